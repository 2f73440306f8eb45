// Copyright (c) 2026 the timegrain authors
// SPDX-License-Identifier: Apache-2.0

#include "timegrain/token_merging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"

#include "json_support.hpp"
#include "timegrain/errors.hpp"
#include "timegrain/rng.hpp"

namespace timegrain {

AttentionSim::AttentionSim(std::size_t n_queries, std::size_t d, std::size_t heads,
                           std::uint64_t seed)
    : n_queries_(n_queries), d_(d), heads_(heads) {
    if (n_queries == 0) throw ArgumentError("n_queries must be positive");
    if (d == 0) throw ArgumentError("d must be positive");
    if (heads == 0) throw ArgumentError("heads must be positive");
    if (d % heads != 0) throw ArgumentError("d must be divisible by heads");

    // One generator for both tables so the pair is a single seeded unit.
    std::mt19937_64 rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<double> q(d * d), k(d * d);
    for (double& x : q) x = uniform_symmetric(rng) * scale;
    for (double& x : k) x = uniform_symmetric(rng) * scale;
    wq_ = Matrix(d, d, std::move(q));
    wk_ = Matrix(d, d, std::move(k));
}

Matrix AttentionSim::project_q(const Matrix& tokens) const {
    if (tokens.rows() != n_queries_ || tokens.cols() != d_) {
        throw ShapeError("tokens must be n_queries x d");
    }
    return matmul(tokens, wq_);
}

Matrix AttentionSim::project_k(const Matrix& tokens) const {
    if (tokens.rows() != n_queries_ || tokens.cols() != d_) {
        throw ShapeError("tokens must be n_queries x d");
    }
    return matmul(tokens, wk_);
}

std::vector<Matrix> compute_attention(const Matrix& q, const Matrix& k, std::size_t d,
                                      std::size_t heads) {
    if (heads == 0) throw ArgumentError("heads must be positive");
    if (q.cols() != d || k.cols() != d) throw ShapeError("q and k must have width d");
    if (d % heads != 0) throw ShapeError("d must be divisible by heads");

    const std::size_t dh = d / heads;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Matrix> out;
    out.reserve(heads);
    for (std::size_t h = 0; h < heads; ++h) {
        Matrix logits(q.rows(), k.rows());
        for (std::size_t i = 0; i < q.rows(); ++i) {
            for (std::size_t jj = 0; jj < k.rows(); ++jj) {
                double s = 0.0;
                for (std::size_t c = h * dh; c < (h + 1) * dh; ++c) s += q(i, c) * k(jj, c);
                logits(i, jj) = s * inv_sqrt_d;
            }
        }
        out.push_back(softmax_rows(logits));
    }
    return out;
}

std::vector<double> token_importance(std::span<const Matrix> per_head) {
    if (per_head.empty()) throw ArgumentError("no attention heads given");
    for (const Matrix& m : per_head) {
        if (m.rows() != m.cols()) throw ShapeError("attention matrices must be square");
    }
    const Matrix avg = mean_over_stack(per_head);
    const std::size_t n = avg.rows();
    std::vector<double> scores(n, 0.0);
    for (std::size_t jj = 0; jj < n; ++jj) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += avg(i, jj);
        scores[jj] = s / static_cast<double>(n);
    }
    return scores;
}

std::vector<std::size_t> select_attentive(std::span<const double> scores, std::size_t k) {
    if (k > scores.size()) throw ArgumentError("cannot select more tokens than scored");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_targets_candidates(const std::vector<std::size_t>& remaining, std::size_t n_contextual) {
    const std::size_t len = remaining.size();
    if (n_contextual > len) throw ArgumentError("more targets requested than remaining tokens");

    std::vector<bool> is_target(len, false);
    for (std::size_t i = 0; i < n_contextual; ++i) is_target[i * len / n_contextual] = true;

    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
    for (std::size_t p = 0; p < len; ++p) {
        (is_target[p] ? out.first : out.second).push_back(remaining[p]);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>>
assign_candidates(const Matrix& keys, const std::vector<std::size_t>& targets,
                  const std::vector<std::size_t>& candidates) {
    if (!candidates.empty() && targets.empty()) {
        throw ArgumentError("candidates need at least one target");
    }
    for (std::size_t idx : targets) {
        if (idx >= keys.rows()) throw ShapeError("target index out of range");
    }
    for (std::size_t idx : candidates) {
        if (idx >= keys.rows()) throw ShapeError("candidate index out of range");
    }

    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(candidates.size());
    for (std::size_t cand : candidates) {
        std::size_t best = targets[0];
        double best_sim = dot(keys.row(cand), keys.row(targets[0]));
        for (std::size_t t = 1; t < targets.size(); ++t) {
            const double sim = dot(keys.row(cand), keys.row(targets[t]));
            if (sim > best_sim) {
                best_sim = sim;
                best = targets[t];
            }
        }
        out.emplace_back(cand, best);
    }
    return out;
}

Matrix merge_candidates(const Matrix& tokens, const Matrix& keys,
                        const std::vector<std::size_t>& targets,
                        const std::vector<std::size_t>& candidates) {
    if (keys.rows() != tokens.rows()) throw ShapeError("keys and tokens row counts differ");
    for (std::size_t idx : targets) {
        if (idx >= tokens.rows()) throw ShapeError("target index out of range");
    }
    const auto assignment = assign_candidates(keys, targets, candidates);

    Matrix out(targets.size(), tokens.cols());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        std::vector<std::size_t> group{targets[t]};
        for (const auto& [cand, tgt] : assignment) {
            if (tgt == targets[t]) group.push_back(cand);
        }
        for (std::size_t c = 0; c < tokens.cols(); ++c) {
            double s = 0.0;
            for (std::size_t idx : group) s += tokens(idx, c);
            out(t, c) = s / static_cast<double>(group.size());
        }
    }
    return out;
}

MergeResult merge_segment(const Matrix& tokens, const AttentionSim& sim, const MergeConfig& cfg) {
    if (tokens.rows() != sim.n_queries() || tokens.cols() != sim.d()) {
        throw ShapeError("tokens must be n_queries x d");
    }
    if (cfg.n_attentive + cfg.n_contextual > tokens.rows()) {
        throw ArgumentError("config keeps more tokens than exist");
    }

    const Matrix q = sim.project_q(tokens);
    const Matrix k = sim.project_k(tokens);
    const auto per_head = compute_attention(q, k, sim.d(), sim.heads());
    const auto scores = token_importance(per_head);

    MergeResult res;
    res.attentive_indices = select_attentive(scores, cfg.n_attentive);

    std::vector<bool> kept(tokens.rows(), false);
    for (std::size_t idx : res.attentive_indices) kept[idx] = true;
    std::vector<std::size_t> remaining;
    remaining.reserve(tokens.rows() - cfg.n_attentive);
    for (std::size_t i = 0; i < tokens.rows(); ++i) {
        if (!kept[i]) remaining.push_back(i);
    }

    std::vector<std::size_t> candidates;
    std::tie(res.target_indices, candidates) = split_targets_candidates(remaining, cfg.n_contextual);

    Matrix contextual(0, tokens.cols());
    if (cfg.n_contextual > 0) {
        res.assignment = assign_candidates(k, res.target_indices, candidates);
        contextual = merge_candidates(tokens, k, res.target_indices, candidates);
    }

    res.output_tokens = Matrix(cfg.n_attentive + cfg.n_contextual, tokens.cols());
    for (std::size_t r = 0; r < res.attentive_indices.size(); ++r) {
        for (std::size_t c = 0; c < tokens.cols(); ++c) {
            res.output_tokens(r, c) = tokens(res.attentive_indices[r], c);
        }
    }
    for (std::size_t r = 0; r < contextual.rows(); ++r) {
        for (std::size_t c = 0; c < tokens.cols(); ++c) {
            res.output_tokens(cfg.n_attentive + r, c) = contextual(r, c);
        }
    }
    return res;
}

std::string MergeResult::to_json() const {
    nlohmann::json j;
    j["attentive_indices"] = attentive_indices;
    j["target_indices"] = target_indices;
    auto pairs = nlohmann::json::array();
    for (const auto& [cand, tgt] : assignment) {
        pairs.push_back(nlohmann::json::array({cand, tgt}));
    }
    j["assignment"] = std::move(pairs);
    j["output_tokens"] = matrix_to_json(output_tokens);
    return j.dump();
}

} // namespace timegrain
