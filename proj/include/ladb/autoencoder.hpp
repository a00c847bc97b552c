#pragma once

#include <string>
#include <vector>

#include "ladb/vec.hpp"

namespace ladb {

// Maps data space to latent space and back. The identity kind is the default
// working mode at toy dimensionality; the affine kind (z = M x + b with M
// square and invertible, checked at construction) exercises the encode/decode
// plumbing with exact mutual inverses.
class Autoencoder {
  public:
    enum class Kind { identity, affine };

    static Autoencoder identity(int dim);
    static Autoencoder affine(std::vector<double> matrix, Vec offset);

    Kind kind() const { return kind_; }
    int latent_dim() const { return latent_dim_; }
    Vec encode(const Vec& x) const;
    Vec decode(const Vec& z) const;

    const std::vector<double>& matrix() const { return matrix_; }
    const Vec& offset() const { return offset_; }

  private:
    Autoencoder() = default;
    Kind kind_ = Kind::identity;
    int latent_dim_ = 0;
    std::vector<double> matrix_;      // affine only, row-major d x d
    std::vector<double> matrix_inv_;  // cached inverse
    Vec offset_;
};

Autoencoder::Kind autoencoder_kind_from_string(const std::string& s);
std::string to_string(Autoencoder::Kind k);

}  // namespace ladb
