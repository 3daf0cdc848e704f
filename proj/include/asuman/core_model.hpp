#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace asuman {

using Age = std::uint64_t;

// 1-based node identifier; the source is not a node.
struct NodeId {
    std::size_t value = 1;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::size_t v) : value(v) {}

    constexpr auto operator<=>(const NodeId&) const = default;
};

// Version age of every node relative to the source.
class AgeVector {
public:
    AgeVector() = default;
    explicit AgeVector(std::size_t n) : ages_(n, 0) {}
    explicit AgeVector(std::vector<Age> ages) : ages_(std::move(ages)) {}

    std::size_t size() const noexcept { return ages_.size(); }
    bool empty() const noexcept { return ages_.empty(); }

    // Throws InvalidInput for an id outside 1..n.
    Age at(NodeId id) const { return ages_[index_of(id)]; }
    Age operator[](NodeId id) const { return ages_[id.value - 1]; }

    std::span<const Age> values() const noexcept { return ages_; }

    // In-place transitions used by the simulator.
    void increment_all() noexcept;
    void reset(NodeId id);
    // Receiver keeps the fresher of the two versions. Returns true if the
    // receiver's age dropped.
    bool merge(NodeId sender, NodeId receiver);

    bool operator==(const AgeVector&) const = default;

private:
    std::size_t index_of(NodeId id) const;

    std::vector<Age> ages_;
};

struct MinAgeSet {
    Age min_age = 0;
    std::vector<NodeId> members;  // ascending
};

AgeVector source_self_update(AgeVector ages);
AgeVector source_update_node(AgeVector ages, NodeId id);
AgeVector gossip_merge(AgeVector ages, NodeId sender, NodeId receiver);
MinAgeSet min_age_set(const AgeVector& ages);

} // namespace asuman
