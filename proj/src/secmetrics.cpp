#include "qkdlab/secmetrics.hpp"

#include <algorithm>
#include <cmath>

namespace qkdlab {

namespace {

double entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

double pguess(const JointDistribution& j) {
    j.validate();
    std::vector<double> best(j.eve_symbols(), 0.0);
    for (std::uint64_t k = 0; k < j.num_keys(); ++k)
        for (std::size_t e = 0; e < j.eve_symbols(); ++e)
            best[e] = std::max(best[e], j.prob(k, e));
    double total = 0.0;
    for (double b : best) total += b;
    return total;
}

double stat_distance(const JointDistribution& j) {
    j.validate();
    std::vector<double> pe = j.eve_marginal();
    double ideal_scale = 1.0 / static_cast<double>(j.num_keys());
    double total = 0.0;
    for (std::uint64_t k = 0; k < j.num_keys(); ++k)
        for (std::size_t e = 0; e < j.eve_symbols(); ++e)
            total += std::abs(j.prob(k, e) - pe[e] * ideal_scale);
    return 0.5 * total;
}

double mutual_info(const JointDistribution& j) {
    j.validate();
    double h_joint = 0.0;
    for (std::uint64_t k = 0; k < j.num_keys(); ++k)
        for (std::size_t e = 0; e < j.eve_symbols(); ++e)
            h_joint += entropy_term(j.prob(k, e));
    double h_key = 0.0;
    for (double p : j.key_marginal()) h_key += entropy_term(p);
    double h_eve = 0.0;
    for (double p : j.eve_marginal()) h_eve += entropy_term(p);
    double mi = h_key + h_eve - h_joint;
    return mi < 0.0 ? 0.0 : mi;  // clip arithmetic dust
}

SecurityReport analyze(const JointDistribution& j) {
    double pg = pguess(j);
    return SecurityReport{pg, -std::log2(pg), stat_distance(j), mutual_info(j)};
}

double check_p1_bound(double d, int n_bits) {
    require(d >= 0.0 && d <= 1.0, "check_p1_bound: d must be in [0,1]");
    require(n_bits >= 1, "check_p1_bound: n_bits must be >= 1");
    return d + std::exp2(-n_bits);
}

JointDistribution make_eq1_extremal(int n_bits, double d) {
    JointDistribution j(n_bits, 1);
    double n_keys = static_cast<double>(j.num_keys());
    require(d >= 0.0 && d <= 1.0 - 1.0 / n_keys + 1e-15,
            "make_eq1_extremal: need 0 <= d <= 1 - 1/N");
    double base = 1.0 / n_keys;
    j.at(0, 0) = base + d;
    double rest = base - d / (n_keys - 1.0);
    for (std::uint64_t k = 1; k < j.num_keys(); ++k) j.at(k, 0) = rest;
    return j;
}

JointDistribution make_know_all(int n_bits, double delta) {
    require(delta >= 0.0 && delta <= 1.0, "make_know_all: delta must be in [0,1]");
    JointDistribution j(n_bits, (std::size_t{1} << n_bits) + 1);
    std::uint64_t n_keys = j.num_keys();
    std::size_t null_symbol = static_cast<std::size_t>(n_keys);
    double p_key = 1.0 / static_cast<double>(n_keys);
    for (std::uint64_t k = 0; k < n_keys; ++k) {
        j.at(k, static_cast<std::size_t>(k)) = delta * p_key;
        j.at(k, null_symbol) = (1.0 - delta) * p_key;
    }
    return j;
}

JointDistribution make_iac_counterexample(int n_bits, double lambda) {
    require(lambda >= 0.0 && lambda <= 1.0,
            "make_iac_counterexample: lambda must be in [0,1]");
    return make_know_all(n_bits, std::exp2(-lambda * n_bits));
}

JointDistribution map_key_axis(const JointDistribution& j,
                               const std::function<std::uint64_t(std::uint64_t)>& map,
                               int out_bits) {
    JointDistribution out(out_bits, j.eve_symbols());
    for (std::uint64_t k = 0; k < j.num_keys(); ++k) {
        std::uint64_t y = map(k);
        require(y < out.num_keys(), "map_key_axis: image out of range");
        for (std::size_t e = 0; e < j.eve_symbols(); ++e)
            out.at(y, e) += j.prob(k, e);
    }
    return out;
}

JointDistribution augment_eve_with_key_function(
    const JointDistribution& j,
    const std::function<std::uint64_t(std::uint64_t)>& fn,
    std::size_t n_values) {
    require(n_values >= 1, "augment_eve_with_key_function: n_values must be >= 1");
    JointDistribution out(j.n_key_bits(), j.eve_symbols() * n_values);
    for (std::uint64_t k = 0; k < j.num_keys(); ++k) {
        std::uint64_t v = fn(k);
        require(v < n_values, "augment_eve_with_key_function: value out of range");
        for (std::size_t e = 0; e < j.eve_symbols(); ++e)
            out.at(k, e * n_values + static_cast<std::size_t>(v)) = j.prob(k, e);
    }
    return out;
}

JointDistribution product(const JointDistribution& a, const JointDistribution& b) {
    int n = a.n_key_bits() + b.n_key_bits();
    JointDistribution out(n, a.eve_symbols() * b.eve_symbols());
    for (std::uint64_t kb = 0; kb < b.num_keys(); ++kb)
        for (std::uint64_t ka = 0; ka < a.num_keys(); ++ka) {
            std::uint64_t k = ka | (kb << a.n_key_bits());
            for (std::size_t eb = 0; eb < b.eve_symbols(); ++eb)
                for (std::size_t ea = 0; ea < a.eve_symbols(); ++ea)
                    out.at(k, ea + eb * a.eve_symbols()) = a.prob(ka, ea) * b.prob(kb, eb);
        }
    return out;
}

}  // namespace qkdlab
