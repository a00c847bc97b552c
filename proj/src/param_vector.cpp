#include "ladb/param_vector.hpp"

#include <stdexcept>

namespace ladb {

std::size_t ParamVector::total() const {
    std::size_t n = 0;
    for (const auto& s : layout) n += s.size();
    return n;
}

void ParamVector::validate() const {
    if (values.size() != total()) {
        throw std::invalid_argument("ParamVector: values length " + std::to_string(values.size()) +
                                    " does not match layout total " + std::to_string(total()));
    }
}

std::size_t ParamVector::offset(std::size_t i) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < i; ++k) off += layout[k].size();
    return off;
}

std::span<double> ParamVector::block(std::size_t i) {
    return {values.data() + offset(i), layout[i].size()};
}

std::span<const double> ParamVector::block(std::size_t i) const {
    return {values.data() + offset(i), layout[i].size()};
}

ParamVector ParamVector::zeros(const std::vector<TensorShape>& layout) {
    ParamVector p;
    p.layout = layout;
    p.values.assign(ParamVector{{}, layout}.total(), 0.0);
    return p;
}

}  // namespace ladb
