// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "timegrain/matrix.hpp"

namespace timegrain {

/// One cross-attention round with seeded Q/K projections, standing in for a
/// trained query projector. Construction is deterministic per seed; the
/// merging contract below depends only on the Q/K/token matrices.
class AttentionSim {
public:
    AttentionSim(std::size_t n_queries, std::size_t d, std::size_t heads, std::uint64_t seed);

    std::size_t n_queries() const { return n_queries_; }
    std::size_t d() const { return d_; }
    std::size_t heads() const { return heads_; }

    // tokens must be n_queries x d.
    Matrix project_q(const Matrix& tokens) const;
    Matrix project_k(const Matrix& tokens) const;

private:
    std::size_t n_queries_;
    std::size_t d_;
    std::size_t heads_;
    Matrix wq_; // d x d
    Matrix wk_; // d x d
};

struct MergeConfig {
    std::size_t n_attentive = 22;
    std::size_t n_contextual = 4;
};

struct MergeResult {
    std::vector<std::size_t> attentive_indices; // ascending: input temporal order
    std::vector<std::size_t> target_indices;    // stride picks over the remainder
    // candidate index -> target index, listed by ascending candidate.
    std::vector<std::pair<std::size_t, std::size_t>> assignment;
    Matrix output_tokens; // (n_attentive + n_contextual) x d

    std::string to_json() const;
};

// Per-head attention Softmax(q_h k_h^T / sqrt(d)); q and k are sliced into
// `heads` equal column blocks and the divisor uses the full width d.
std::vector<Matrix> compute_attention(const Matrix& q, const Matrix& k, std::size_t d,
                                      std::size_t heads);

// Head-average the square attention matrices, then score each token by the
// attention it receives: score(j) = mean over rows i of A[i][j].
std::vector<double> token_importance(std::span<const Matrix> per_head);

// Indices of the k largest scores, ties toward the lower index, returned
// ascending so temporal order survives selection.
std::vector<std::size_t> select_attentive(std::span<const double> scores, std::size_t k);

// Targets are the n_contextual positions at uniform stride floor(i*len/n)
// over `remaining`; everything else becomes a merge candidate.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_targets_candidates(const std::vector<std::size_t>& remaining, std::size_t n_contextual);

// Assigns each candidate to the target whose key has the largest dot product
// with its own (ties toward the lower target index).
std::vector<std::pair<std::size_t, std::size_t>>
assign_candidates(const Matrix& keys, const std::vector<std::size_t>& targets,
                  const std::vector<std::size_t>& candidates);

// One contextual token per target: the mean of the target's token vector and
// its assigned candidates' vectors. No candidates means targets pass through.
Matrix merge_candidates(const Matrix& tokens, const Matrix& keys,
                        const std::vector<std::size_t>& targets,
                        const std::vector<std::size_t>& candidates);

// Full pipeline: attention -> importance -> attentive selection -> split ->
// merge. Output rows are the attentive tokens in input order followed by the
// contextual tokens in target order. With n_contextual == 0 the non-attentive
// remainder is simply dropped.
MergeResult merge_segment(const Matrix& tokens, const AttentionSim& sim, const MergeConfig& cfg);

} // namespace timegrain
