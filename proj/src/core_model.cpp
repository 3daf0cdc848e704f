#include "asuman/core_model.hpp"

#include <algorithm>
#include <string>

#include "asuman/errors.hpp"

namespace asuman {

std::size_t AgeVector::index_of(NodeId id) const {
    if (id.value < 1 || id.value > ages_.size()) {
        throw InvalidInput("node id " + std::to_string(id.value) +
                           " outside 1.." + std::to_string(ages_.size()));
    }
    return id.value - 1;
}

void AgeVector::increment_all() noexcept {
    for (auto& a : ages_) ++a;
}

void AgeVector::reset(NodeId id) { ages_[index_of(id)] = 0; }

bool AgeVector::merge(NodeId sender, NodeId receiver) {
    const auto s = index_of(sender);
    const auto r = index_of(receiver);
    if (s == r) {
        throw InvalidInput("gossip from node " + std::to_string(sender.value) + " to itself");
    }
    if (ages_[s] < ages_[r]) {
        ages_[r] = ages_[s];
        return true;
    }
    return false;
}

AgeVector source_self_update(AgeVector ages) {
    ages.increment_all();
    return ages;
}

AgeVector source_update_node(AgeVector ages, NodeId id) {
    ages.reset(id);
    return ages;
}

AgeVector gossip_merge(AgeVector ages, NodeId sender, NodeId receiver) {
    ages.merge(sender, receiver);
    return ages;
}

MinAgeSet min_age_set(const AgeVector& ages) {
    if (ages.empty()) throw InvalidInput("min_age_set of an empty age vector");
    const auto values = ages.values();
    MinAgeSet out;
    out.min_age = *std::min_element(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == out.min_age) out.members.emplace_back(i + 1);
    }
    return out;
}

} // namespace asuman
