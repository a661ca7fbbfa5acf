#pragma once

// Finite absorbing Markov chains with exact absorption-probability solves.
//
// A chain is stored densely: n labelled states, a row-stochastic n x n
// transition matrix, and a flag per state marking it absorbing. Absorption
// probabilities solve the standard linear system (I - Q) B = R, where Q is
// the transient-to-transient block and R the transient-to-absorbing block.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "truelkit/core.hpp"

namespace truelkit {

class AbsorbingChain {
public:
    // `transition` is row-major n x n with n == labels.size(). Throws
    // std::invalid_argument unless every entry is a probability, every row
    // sums to 1 within 1e-12, and every absorbing state is a unit self-loop.
    AbsorbingChain(std::vector<std::string> labels, std::vector<double> transition,
                   std::vector<bool> absorbing)
        : labels_(std::move(labels)), p_(std::move(transition)), absorbing_(std::move(absorbing)) {
        const std::size_t n = labels_.size();
        if (absorbing_.size() != n || p_.size() != n * n)
            throw std::invalid_argument("chain dimensions do not match state count");
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double x = p_[i * n + j];
                if (!(x >= 0.0 && x <= 1.0))
                    throw std::invalid_argument("transition probability out of [0,1] in row " +
                                                labels_[i]);
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("row " + labels_[i] + " sums to " +
                                            std::to_string(sum) + ", expected 1");
            if (absorbing_[i] && p_[i * n + i] != 1.0)
                throw std::invalid_argument("absorbing state " + labels_[i] +
                                            " is not a unit self-loop");
        }
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    bool is_absorbing(std::size_t i) const { return absorbing_.at(i); }
    double prob(std::size_t from, std::size_t to) const {
        return p_.at(from * size() + to);
    }

    std::size_t index_of(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return i;
        throw std::invalid_argument("no chain state labelled \"" + std::string(label) + "\"");
    }

private:
    std::vector<std::string> labels_;
    std::vector<double> p_;       // row-major
    std::vector<bool> absorbing_;
};

// Incremental construction: declare states, accumulate probability mass on
// edges, then build (which runs the full AbsorbingChain validation).
class ChainBuilder {
public:
    std::size_t add_state(std::string label, bool absorbing = false) {
        labels_.push_back(std::move(label));
        absorbing_.push_back(absorbing);
        return labels_.size() - 1;
    }

    void add_prob(std::size_t from, std::size_t to, double p) {
        edges_.emplace_back(from, to, p);
    }

    AbsorbingChain build() {
        const std::size_t n = labels_.size();
        std::vector<double> m(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (absorbing_[i]) m[i * n + i] = 1.0;
        for (const auto& [from, to, p] : edges_)
            m[from * n + to] += p;
        return AbsorbingChain(labels_, std::move(m), absorbing_);
    }

private:
    std::vector<std::string> labels_;
    std::vector<bool> absorbing_;
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges_;
};

// The sub-chain of states reachable from `start` along positive-probability
// edges, preserving relative state order and labels. Useful when a chain
// enumerates a full documented state space but a particular start makes part
// of it unreachable (and possibly non-absorbing in isolation).
inline AbsorbingChain reachable_subchain(const AbsorbingChain& chain, std::size_t start) {
    const std::size_t n = chain.size();
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> frontier;
    seen.at(start) = true;
    frontier.push(start);
    while (!frontier.empty()) {
        const std::size_t i = frontier.front();
        frontier.pop();
        for (std::size_t j = 0; j < n; ++j)
            if (!seen[j] && chain.prob(i, j) > 0.0) {
                seen[j] = true;
                frontier.push(j);
            }
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (seen[i]) keep.push_back(i);

    std::vector<std::string> labels;
    std::vector<bool> absorbing;
    std::vector<double> m(keep.size() * keep.size(), 0.0);
    for (std::size_t a = 0; a < keep.size(); ++a) {
        labels.push_back(chain.label(keep[a]));
        absorbing.push_back(chain.is_absorbing(keep[a]));
        for (std::size_t b = 0; b < keep.size(); ++b)
            m[a * keep.size() + b] = chain.prob(keep[a], keep[b]);
    }
    return AbsorbingChain(std::move(labels), std::move(m), std::move(absorbing));
}

// Absorption probabilities for every transient state. Row t of `b` gives the
// probability of ending in each absorbing state (in `absorbing_states` order)
// when starting from transient_states[t].
struct AbsorptionResult {
    std::vector<std::size_t> transient_states;   // chain indices, ascending
    std::vector<std::size_t> absorbing_states;   // chain indices, ascending
    std::vector<double> b;                       // row-major, transient x absorbing

    double prob(std::size_t chain_from, std::size_t chain_absorbing) const {
        const std::size_t r = index_in(transient_states, chain_from, "transient");
        const std::size_t c = index_in(absorbing_states, chain_absorbing, "absorbing");
        return b[r * absorbing_states.size() + c];
    }

private:
    static std::size_t index_in(const std::vector<std::size_t>& v, std::size_t x,
                                const char* kind) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == x) return i;
        throw std::invalid_argument(std::string("state ") + std::to_string(x) + " is not " +
                                    kind + " in this result");
    }
};

// Solves (I - Q) B = R by Gaussian elimination with partial pivoting.
//
// Throws NonAbsorbingError, naming an offending state, when the chain cannot
// absorb: a pivot falls below 1e-12 (a transient class with no escape), the
// residual max-norm of the solved system exceeds 1e-8, or some transient
// state's total absorption mass deviates from 1 by more than 1e-9.
inline AbsorptionResult solve_absorption(const AbsorbingChain& chain) {
    const std::size_t n = chain.size();
    AbsorptionResult out;
    for (std::size_t i = 0; i < n; ++i)
        (chain.is_absorbing(i) ? out.absorbing_states : out.transient_states).push_back(i);
    const std::size_t t = out.transient_states.size();
    const std::size_t k = out.absorbing_states.size();
    if (t == 0) return out;
    if (k == 0)
        throw NonAbsorbingError("chain has no absorbing state; " +
                                chain.label(out.transient_states[0]) + " can never absorb");

    // a = I - Q (kept pristine for the residual check), r = transient->absorbing.
    std::vector<double> a(t * t, 0.0), r(t * k, 0.0);
    for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j)
            a[i * t + j] = (i == j ? 1.0 : 0.0) -
                           chain.prob(out.transient_states[i], out.transient_states[j]);
        for (std::size_t j = 0; j < k; ++j)
            r[i * k + j] = chain.prob(out.transient_states[i], out.absorbing_states[j]);
    }

    // LU factorization with partial pivoting on a working copy; the right-hand
    // side columns ride along (classic augmented elimination).
    std::vector<double> lu = a;
    std::vector<double> b = r;
    for (std::size_t col = 0; col < t; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < t; ++row)
            if (std::abs(lu[row * t + col]) > std::abs(lu[piv * t + col])) piv = row;
        if (std::abs(lu[piv * t + col]) < 1e-12)
            throw NonAbsorbingError("state " + chain.label(out.transient_states[col]) +
                                    " has no path to absorption (singular system)");
        if (piv != col) {
            for (std::size_t j = 0; j < t; ++j) std::swap(lu[piv * t + j], lu[col * t + j]);
            for (std::size_t j = 0; j < k; ++j) std::swap(b[piv * k + j], b[col * k + j]);
        }
        for (std::size_t row = col + 1; row < t; ++row) {
            const double f = lu[row * t + col] / lu[col * t + col];
            if (f == 0.0) continue;
            lu[row * t + col] = 0.0;
            for (std::size_t j = col + 1; j < t; ++j) lu[row * t + j] -= f * lu[col * t + j];
            for (std::size_t j = 0; j < k; ++j) b[row * k + j] -= f * b[col * k + j];
        }
    }
    for (std::size_t col = t; col-- > 0;) {
        for (std::size_t j = 0; j < k; ++j) {
            double s = b[col * k + j];
            for (std::size_t jj = col + 1; jj < t; ++jj)
                s -= lu[col * t + jj] * b[jj * k + j];
            b[col * k + j] = s / lu[col * t + col];
        }
    }

    // Residual check against the untouched system: || (I-Q) B - R ||_inf.
    double resid = 0.0;
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double s = -r[i * k + j];
            for (std::size_t jj = 0; jj < t; ++jj) s += a[i * t + jj] * b[jj * k + j];
            resid = std::max(resid, std::abs(s));
        }
    if (resid > 1e-8)
        throw NonAbsorbingError("absorption solve residual " + std::to_string(resid) +
                                " exceeds 1e-8; chain is numerically non-absorbing");

    for (std::size_t i = 0; i < t; ++i) {
        double mass = 0.0;
        for (std::size_t j = 0; j < k; ++j) mass += b[i * k + j];
        if (std::abs(mass - 1.0) > 1e-9)
            throw NonAbsorbingError("state " + chain.label(out.transient_states[i]) +
                                    " absorbs with total probability " + std::to_string(mass) +
                                    ", expected 1");
    }

    out.b = std::move(b);
    return out;
}

} // namespace truelkit
