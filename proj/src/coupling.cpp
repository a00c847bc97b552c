#include "ladb/coupling.hpp"

#include <cstddef>
#include <stdexcept>

namespace ladb {

int CouplingMixture::dim() const {
    if (!paired.empty()) return static_cast<int>(paired.front().first.size());
    if (!unpaired.empty()) return static_cast<int>(unpaired.front().size());
    return 0;
}

void CouplingMixture::validate() const {
    if (paired.empty() && unpaired.empty()) {
        throw std::invalid_argument("CouplingMixture: paired and unpaired must not both be empty");
    }
    const std::size_t d = static_cast<std::size_t>(dim());
    if (d == 0) throw std::invalid_argument("CouplingMixture: zero-dimensional points");
    for (const auto& [x0, x1] : paired) {
        if (x0.size() != d || x1.size() != d) {
            throw std::invalid_argument("CouplingMixture: inconsistent paired dimensions");
        }
        if (!all_finite(x0) || !all_finite(x1)) {
            throw std::invalid_argument("CouplingMixture: non-finite paired entry");
        }
    }
    for (const Vec& x0 : unpaired) {
        if (x0.size() != d) {
            throw std::invalid_argument("CouplingMixture: inconsistent unpaired dimensions");
        }
        if (!all_finite(x0)) throw std::invalid_argument("CouplingMixture: non-finite unpaired entry");
    }
    if (!labels.empty() && labels.size() != size()) {
        throw std::invalid_argument("CouplingMixture: label count does not match entry count");
    }
    for (int l : labels) {
        if (l < 0) throw std::invalid_argument("CouplingMixture: negative label");
    }
}

CouplingMixture build_mixture(const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_sets,
                              const std::vector<Batch>& unpaired_targets,
                              const std::vector<std::vector<int>>& paired_label_sets) {
    if (!paired_label_sets.empty() && paired_label_sets.size() != paired_sets.size()) {
        throw std::invalid_argument("build_mixture: paired_label_sets must parallel paired_sets");
    }
    CouplingMixture mix;
    bool any_labels = false;
    bool any_unlabelled = false;

    for (std::size_t s = 0; s < paired_sets.size(); ++s) {
        const auto& set = paired_sets[s];
        const std::vector<int>* set_labels =
            paired_label_sets.empty() ? nullptr : &paired_label_sets[s];
        if (set_labels && !set_labels->empty() && set_labels->size() != set.size()) {
            throw std::invalid_argument("build_mixture: paired label list length mismatch");
        }
        for (std::size_t i = 0; i < set.size(); ++i) {
            mix.paired.push_back(set[i]);
            if (set_labels && !set_labels->empty()) {
                mix.labels.push_back((*set_labels)[i]);
                any_labels = true;
            } else {
                any_unlabelled = true;
            }
        }
    }
    for (const Batch& b : unpaired_targets) {
        b.validate();
        for (std::size_t i = 0; i < b.points.size(); ++i) {
            mix.unpaired.push_back(b.points[i]);
            if (!b.labels.empty()) {
                mix.labels.push_back(b.labels[i]);
                any_labels = true;
            } else {
                any_unlabelled = true;
            }
        }
    }
    if (any_labels && any_unlabelled) {
        throw std::invalid_argument(
            "build_mixture: labels must be provided for all entries or none");
    }
    mix.validate();
    return mix;
}

DrawnPair sample_pair(const CouplingMixture& mixture, Rng& rng) {
    const std::size_t total = mixture.size();
    if (total == 0) throw std::invalid_argument("sample_pair: empty mixture");
    const std::size_t idx = rng.index(total);
    // The prior draw happens unconditionally; see the header contract.
    Vec z = rng.normal_vec(static_cast<std::size_t>(mixture.dim()));

    DrawnPair out;
    if (!mixture.labels.empty()) out.label = mixture.labels[idx];
    if (idx < mixture.paired.size()) {
        out.x0 = mixture.paired[idx].first;
        out.x1 = mixture.paired[idx].second;
        out.provenance = Provenance::paired;
    } else {
        out.x0 = mixture.unpaired[idx - mixture.paired.size()];
        out.x1 = std::move(z);
        out.provenance = Provenance::unpaired;
    }
    return out;
}

MixtureSampler::MixtureSampler(CouplingMixture mixture) : mixture_(std::move(mixture)) {
    mixture_.validate();
}

void MixtureSampler::sample(Rng& rng, Vec& x0, Vec& x1, int& label) const {
    DrawnPair p = sample_pair(mixture_, rng);
    x0 = std::move(p.x0);
    x1 = std::move(p.x1);
    label = p.label;
}

IndependentCoupling::IndependentCoupling(std::vector<Vec> points, std::vector<int> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
    if (points_.empty()) throw std::invalid_argument("IndependentCoupling: empty point set");
    const std::size_t d = points_.front().size();
    if (d == 0) throw std::invalid_argument("IndependentCoupling: zero-dimensional points");
    for (const Vec& p : points_) {
        if (p.size() != d) {
            throw std::invalid_argument("IndependentCoupling: inconsistent dimensions");
        }
        if (!all_finite(p)) throw std::invalid_argument("IndependentCoupling: non-finite point");
    }
    if (!labels_.empty() && labels_.size() != points_.size()) {
        throw std::invalid_argument("IndependentCoupling: label count does not match point count");
    }
}

IndependentCoupling::IndependentCoupling(const Batch& batch)
    : IndependentCoupling(batch.points, batch.labels) {}

void IndependentCoupling::sample(Rng& rng, Vec& x0, Vec& x1, int& label) const {
    const std::size_t idx = rng.index(points_.size());
    x1 = rng.normal_vec(points_.front().size());
    x0 = points_[idx];
    label = labels_.empty() ? -1 : labels_[idx];
}

int IndependentCoupling::dim() const { return static_cast<int>(points_.front().size()); }

}  // namespace ladb
