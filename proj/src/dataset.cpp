#include "spreadverify/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sv {

dataset::dataset(std::vector<double> features, std::vector<label> labels, std::size_t d)
    : m_features(std::move(features)), m_labels(std::move(labels)), m_d(d) {
    if (m_features.size() != m_labels.size() * m_d) {
        throw structural_error("dataset: feature matrix does not match labels x d");
    }
    if (!std::all_of(m_features.begin(), m_features.end(), [](double v) { return std::isfinite(v); })) {
        throw input_error("dataset: feature values must be finite");
    }
}

void dataset::add(instance_view x, label y) {
    if (x.size() != m_d) {
        throw input_error("dataset: row has " + std::to_string(x.size()) + " features, expected " +
                          std::to_string(m_d));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw input_error("dataset: feature values must be finite");
    }
    m_features.insert(m_features.end(), x.begin(), x.end());
    m_labels.push_back(y);
}

std::size_t dataset::count(label y) const {
    return static_cast<std::size_t>(std::count(m_labels.begin(), m_labels.end(), y));
}

dataset dataset::subset(std::span<const std::size_t> rows) const {
    dataset out(m_d);
    out.m_features.reserve(rows.size() * m_d);
    out.m_labels.reserve(rows.size());
    for (auto r : rows) {
        auto x = row(r);
        out.m_features.insert(out.m_features.end(), x.begin(), x.end());
        out.m_labels.push_back(m_labels[r]);
    }
    return out;
}

dataset dataset::project(std::span<const std::size_t> columns) const {
    for (auto c : columns) {
        if (c >= m_d) throw contract_error("dataset::project: column out of range");
    }
    dataset out(columns.size());
    out.m_features.reserve(size() * columns.size());
    for (std::size_t i = 0; i != size(); ++i) {
        auto x = row(i);
        for (auto c : columns) out.m_features.push_back(x[c]);
    }
    out.m_labels = m_labels;
    return out;
}

}  // namespace sv
