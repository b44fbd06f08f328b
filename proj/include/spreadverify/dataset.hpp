#pragma once

#include "core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sv {

/// Row-major feature matrix with +-1 labels.
class dataset {
public:
    explicit dataset(std::size_t d) : m_d(d) {}
    dataset(std::vector<double> features, std::vector<label> labels, std::size_t d);

    /// Throws input_error on a dimension mismatch or a non-finite value.
    void add(instance_view x, label y);

    std::size_t size() const { return m_labels.size(); }
    bool empty() const { return m_labels.empty(); }
    std::size_t dimension() const { return m_d; }

    instance_view row(std::size_t i) const { return {m_features.data() + i * m_d, m_d}; }
    label label_of(std::size_t i) const { return m_labels[i]; }
    std::span<const label> labels() const { return m_labels; }
    std::size_t count(label y) const;

    dataset subset(std::span<const std::size_t> rows) const;
    /// Keep only the listed columns, in the listed order.
    dataset project(std::span<const std::size_t> columns) const;

    friend bool operator==(dataset const&, dataset const&) = default;

private:
    std::vector<double> m_features;
    std::vector<label> m_labels;
    std::size_t m_d;
};

}  // namespace sv
