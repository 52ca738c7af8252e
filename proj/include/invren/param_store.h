// Copyright (c) 2026 the invren authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace invren {

// Flat storage for every trainable scalar in the system, with a same-shape
// gradient accumulator. Fields, exposures and per-class albedos register
// named segments; segment ranges are disjoint and cover the whole store by
// construction (segments are only ever appended).
class ParameterStore {
public:
    struct Segment {
        std::string name;
        uint32_t offset = 0;
        uint32_t length = 0;
    };

    ParameterStore() = default;
    ParameterStore(ParameterStore&& other) noexcept
        : values_(std::move(other.values_)), grads_(std::move(other.grads_)), segments_(std::move(other.segments_)) {}
    ParameterStore& operator=(ParameterStore&& other) noexcept {
        values_ = std::move(other.values_);
        grads_ = std::move(other.grads_);
        segments_ = std::move(other.segments_);
        return *this;
    }
    ParameterStore(const ParameterStore&) = delete;
    ParameterStore& operator=(const ParameterStore&) = delete;

    uint32_t add_segment(const std::string& name, uint32_t length) {
        for (const auto& s : segments_)
            if (s.name == name) throw std::invalid_argument("ParameterStore: duplicate segment '" + name + "'");
        uint32_t offset = static_cast<uint32_t>(values_.size());
        segments_.push_back({name, offset, length});
        values_.resize(values_.size() + length, 0.0);
        grads_.resize(values_.size(), 0.0);
        return offset;
    }

    const Segment& segment(const std::string& name) const {
        for (const auto& s : segments_)
            if (s.name == name) return s;
        throw std::out_of_range("ParameterStore: no segment '" + name + "'");
    }

    bool has_segment(const std::string& name) const {
        for (const auto& s : segments_)
            if (s.name == name) return true;
        return false;
    }

    const std::vector<Segment>& segments() const { return segments_; }

    uint32_t size() const { return static_cast<uint32_t>(values_.size()); }

    double value(uint32_t i) const {
        check_index(i);
        return values_[i];
    }
    void set_value(uint32_t i, double v) {
        check_index(i);
        values_[i] = v;
    }

    double grad(uint32_t i) const {
        check_index(i);
        return grads_[i];
    }
    void add_grad(uint32_t i, double g) {
        check_index(i);
        grads_[i] += g;
    }

    double* values_data() { return values_.data(); }
    const double* values_data() const { return values_.data(); }
    double* grads_data() { return grads_.data(); }
    const double* grads_data() const { return grads_.data(); }

    void zero_grads() { std::fill(grads_.begin(), grads_.end(), 0.0); }

    // Gradient accumulation from worker tapes is serialized on this lock;
    // reads of values are lock-free (single writer between batches).
    std::mutex& grad_mutex() const { return grad_mutex_; }

private:
    void check_index(uint32_t i) const {
        if (i >= values_.size()) throw std::out_of_range("ParameterStore: unregistered parameter access");
    }

    std::vector<double> values_;
    std::vector<double> grads_;
    std::vector<Segment> segments_;
    mutable std::mutex grad_mutex_;
};

}  // namespace invren
