#pragma once

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

#include "survive/env.hpp"
#include "survive/rng.hpp"

namespace survive {

struct TransitionRecord {
    State s_t;
    int a_t = 0;
    State s_next;
    bool terminated = false;
    bool truncated = false;
};

// Bounded FIFO store of cross-episode records. Eviction is strictly
// oldest-first; sampling is uniform with replacement.
template <class Record>
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0)
            throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const Record& operator[](std::size_t i) const { return records_[i]; }

    void push(Record record) {
        records_.push_back(std::move(record));
        if (records_.size() > capacity_) records_.pop_front();
    }

    std::vector<Record> sample(std::size_t batch_size, Rng& rng) const {
        if (records_.empty())
            throw std::logic_error("ReplayBuffer::sample: buffer is empty");
        std::vector<Record> batch;
        batch.reserve(batch_size);
        for (std::size_t i = 0; i < batch_size; ++i)
            batch.push_back(records_[static_cast<std::size_t>(
                rng.uniform_int(static_cast<int>(records_.size())))]);
        return batch;
    }

private:
    std::size_t capacity_;
    std::deque<Record> records_;
};

// Transitions of the current episode, in order. Enforces that consecutive
// records chain (s_next of one equals s_t of the next) and that a finished
// episode accepts no further pushes.
class EpisodeBuffer {
public:
    void push(const TransitionRecord& record) {
        if (record.terminated && record.truncated)
            throw std::invalid_argument(
                "EpisodeBuffer::push: terminated and truncated are mutually exclusive");
        if (record.s_t.size() != record.s_next.size())
            throw std::invalid_argument("EpisodeBuffer::push: state dimension mismatch");
        if (!records_.empty()) {
            const auto& last = records_.back();
            if (last.terminated || last.truncated)
                throw std::logic_error("EpisodeBuffer::push: episode already ended");
            if (last.s_next != record.s_t)
                throw std::invalid_argument("EpisodeBuffer::push: chain invariant violated");
        }
        records_.push_back(record);
    }

    void clear() { records_.clear(); }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const std::vector<TransitionRecord>& records() const { return records_; }
    const TransitionRecord& operator[](std::size_t i) const { return records_[i]; }

    bool ended_terminated() const {
        return !records_.empty() && records_.back().terminated;
    }
    bool ended_truncated() const {
        return !records_.empty() && records_.back().truncated;
    }

private:
    std::vector<TransitionRecord> records_;
};

struct HeadTailSplit {
    // ascending episode indices; every head index > every tail index
    std::vector<std::size_t> head_indices;
    std::vector<std::size_t> tail_indices;
    std::vector<State> head;
    std::vector<State> tail;
};

// Splits a terminated episode into the head (the final min(H_r+1, T+1)
// visited states, where T indexes the last state recorded before entering a
// terminal state) and a tail of up to H_r earlier states sampled uniformly
// without replacement.
inline HeadTailSplit head_tail_split(const EpisodeBuffer& episode, int reverse_horizon,
                                     Rng& rng) {
    if (reverse_horizon < 1)
        throw std::invalid_argument("head_tail_split: reverse horizon must be >= 1");
    if (!episode.ended_terminated())
        throw std::invalid_argument(
            "head_tail_split: episode did not end in termination");

    const std::size_t count = episode.size(); // states s_0..s_T, T = count-1
    const std::size_t horizon = static_cast<std::size_t>(reverse_horizon);
    const std::size_t head_start = count > horizon + 1 ? count - horizon - 1 : 0;

    HeadTailSplit split;
    for (std::size_t t = head_start; t < count; ++t) {
        split.head_indices.push_back(t);
        split.head.push_back(episode[t].s_t);
    }
    const std::size_t tail_pool = head_start;
    const std::size_t tail_count = tail_pool < horizon ? tail_pool : horizon;
    split.tail_indices = rng.sample_without_replacement(tail_pool, tail_count);
    for (std::size_t t : split.tail_indices) split.tail.push_back(episode[t].s_t);
    return split;
}

} // namespace survive
