#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ladb/datasets.hpp"
#include "ladb/diffusion.hpp"
#include "ladb/rng.hpp"
#include "ladb/vec.hpp"

namespace ladb {

// The semi-supervised coupling over (x0, x1) endpoint pairs: a uniform mixture
// of stored exact correspondences (paired) and stored data points whose latent
// partner is drawn fresh from the standard Gaussian prior on every access
// (unpaired). All indices carry the same weight 1/(|paired| + |unpaired|).
struct CouplingMixture {
    std::vector<std::pair<Vec, Vec>> paired;  // (x0 data point, x1 latent partner)
    std::vector<Vec> unpaired;                // x0 data points; x1 resampled per draw
    // Class labels over the disjoint union, paired entries first. Either empty
    // or one label per stored entry; carried through to conditional training.
    std::vector<int> labels;

    std::size_t size() const { return paired.size() + unpaired.size(); }
    int dim() const;
    void validate() const;  // throws std::invalid_argument on violations
};

enum class Provenance { paired, unpaired };

struct DrawnPair {
    Vec x0;
    Vec x1;
    Provenance provenance;
    int label = -1;  // -1 when the mixture carries no labels
};

// Concatenates per-source paired lists and unpaired target batches into one
// uniformly weighted mixture. Batch labels propagate to the mixture; paired
// entries can be labelled via the optional parallel label lists. Labels must
// be all-present or all-absent across the union. Throws on dimension
// inconsistency or an empty union.
CouplingMixture build_mixture(const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_sets,
                              const std::vector<Batch>& unpaired_targets,
                              const std::vector<std::vector<int>>& paired_label_sets = {});

// One draw from the mixture: a uniform index, then the stored pair (paired) or
// the stored point with a fresh N(0, I) latent (unpaired). Every call consumes
// one index draw plus dim() normals from rng regardless of the branch taken,
// so the stream position after n draws is independent of which entries came up.
DrawnPair sample_pair(const CouplingMixture& mixture, Rng& rng);

// PairSampler view of a mixture for dsm_train.
class MixtureSampler : public PairSampler {
  public:
    explicit MixtureSampler(CouplingMixture mixture);
    void sample(Rng& rng, Vec& x0, Vec& x1, int& label) const override;
    std::size_t size() const override { return mixture_.size(); }
    int dim() const override { return mixture_.dim(); }
    const CouplingMixture& mixture() const { return mixture_; }

  private:
    CouplingMixture mixture_;
};

// The fully unpaired baseline coupling: x0 uniform over the stored points, x1
// always a fresh N(0, I) draw. Consumes rng identically to MixtureSampler, so
// a mixture with no paired entries reproduces this sampler draw-for-draw.
class IndependentCoupling : public PairSampler {
  public:
    explicit IndependentCoupling(std::vector<Vec> points, std::vector<int> labels = {});
    explicit IndependentCoupling(const Batch& batch);
    void sample(Rng& rng, Vec& x0, Vec& x1, int& label) const override;
    std::size_t size() const override { return points_.size(); }
    int dim() const override;

  private:
    std::vector<Vec> points_;
    std::vector<int> labels_;
};

}  // namespace ladb
