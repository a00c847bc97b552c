#include "ladb/autoencoder.hpp"

#include <stdexcept>
#include <utility>

#include "ladb/linalg.hpp"

namespace ladb {

Autoencoder Autoencoder::identity(int dim) {
    if (dim <= 0) throw std::invalid_argument("Autoencoder::identity: dim must be positive");
    Autoencoder ae;
    ae.kind_ = Kind::identity;
    ae.latent_dim_ = dim;
    return ae;
}

Autoencoder Autoencoder::affine(std::vector<double> matrix, Vec offset) {
    const int d = static_cast<int>(offset.size());
    if (d == 0) throw std::invalid_argument("Autoencoder::affine: offset must be non-empty");
    if (matrix.size() != offset.size() * offset.size()) {
        throw std::invalid_argument("Autoencoder::affine: matrix size does not match offset");
    }
    Autoencoder ae;
    ae.kind_ = Kind::affine;
    ae.latent_dim_ = d;
    ae.matrix_inv_ = invert_matrix(matrix, d);  // throws if singular
    ae.matrix_ = std::move(matrix);
    ae.offset_ = std::move(offset);
    return ae;
}

Vec Autoencoder::encode(const Vec& x) const {
    if (static_cast<int>(x.size()) != latent_dim_) {
        throw std::invalid_argument("Autoencoder::encode: dimension mismatch");
    }
    if (kind_ == Kind::identity) return x;
    Vec z = mat_vec(matrix_, x);
    axpy(z, 1.0, offset_);
    return z;
}

Vec Autoencoder::decode(const Vec& z) const {
    if (static_cast<int>(z.size()) != latent_dim_) {
        throw std::invalid_argument("Autoencoder::decode: dimension mismatch");
    }
    if (kind_ == Kind::identity) return z;
    Vec shifted = z;
    axpy(shifted, -1.0, offset_);
    return mat_vec(matrix_inv_, shifted);
}

Autoencoder::Kind autoencoder_kind_from_string(const std::string& s) {
    if (s == "identity") return Autoencoder::Kind::identity;
    if (s == "affine") return Autoencoder::Kind::affine;
    throw std::invalid_argument("unknown autoencoder kind: " + s);
}

std::string to_string(Autoencoder::Kind k) {
    switch (k) {
        case Autoencoder::Kind::identity: return "identity";
        case Autoencoder::Kind::affine: return "affine";
    }
    throw std::invalid_argument("unknown autoencoder kind enum value");
}

}  // namespace ladb
