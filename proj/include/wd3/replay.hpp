#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wd3/rng.hpp"

namespace wd3 {

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    // 1 when the episode terminated (not truncated): the target bootstraps
    // through horizon cutoffs.
    double done_mask = 0.0;
};

// Fixed-capacity ring with uniform sampling (with replacement). Oldest entry
// is overwritten first once full.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("replay: capacity must be positive");
        storage_.reserve(capacity < 4096 ? capacity : 4096);
    }

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    void push(Transition t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(t));
        } else {
            storage_[write_cursor_] = std::move(t);
        }
        write_cursor_ = (write_cursor_ + 1) % capacity_;
    }

    const Transition& at(std::size_t i) const { return storage_[i]; }

    std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const {
        if (batch_size == 0) throw std::invalid_argument("replay: batch size must be positive");
        if (storage_.size() < batch_size)
            throw std::runtime_error("replay: not enough transitions stored");
        std::vector<const Transition*> batch(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i)
            batch[i] = &storage_[rng.uniform_index(storage_.size())];
        return batch;
    }

private:
    std::size_t capacity_;
    std::size_t write_cursor_ = 0;
    std::vector<Transition> storage_;
};

}  // namespace wd3
