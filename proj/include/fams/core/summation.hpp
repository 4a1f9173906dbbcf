#pragma once

#include <fams/core/parallel.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fams {

enum class Summation { Compensated, Pairwise };

inline std::string_view to_string(Summation s) { return s == Summation::Compensated ? "compensated" : "pairwise"; }

/// Neumaier's variant of Kahan summation.
class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
        else comp_ += (v - t) + sum_;
        sum_ = t;
    }
    NeumaierSum& operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double pairwise_sum(std::span<const double> v) {
    constexpr std::size_t leaf = 32;
    if (v.size() <= leaf) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double reduce(std::span<const double> v, Summation mode) {
    if (mode == Summation::Pairwise) return pairwise_sum(v);
    NeumaierSum s;
    for (double x : v) s.add(x);
    return s.value();
}

/// Chunk length of deterministic reductions. Independent of the thread count so results are bit-identical.
inline constexpr std::size_t reduction_chunk = 4096;

/// Sums term(i) for i in [0, n) with a fixed chunk decomposition.
template <class Term>
double deterministic_sum(std::size_t n, Term&& term, Summation mode = Summation::Compensated) {
    const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
    std::vector<double> partial(chunks, 0.0);
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t begin = c * reduction_chunk;
        const std::size_t end = std::min(n, begin + reduction_chunk);
        if (mode == Summation::Compensated) {
            NeumaierSum s;
            for (std::size_t i = begin; i < end; ++i) s.add(term(i));
            partial[c] = s.value();
        } else {
            double buffer[reduction_chunk];
            for (std::size_t i = begin; i < end; ++i) buffer[i - begin] = term(i);
            partial[c] = pairwise_sum(std::span<const double>(buffer, end - begin));
        }
    });
    return reduce(partial, mode);
}

} // namespace fams
