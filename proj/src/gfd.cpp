#include "fid/gfd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fid {

namespace {

double det(const std::vector<std::vector<double>>& a) {
    switch (a.size()) {
        case 1: return a[0][0];
        case 2: return a[0][0] * a[1][1] - a[0][1] * a[1][0];
        case 3:
            return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                   a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                   a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        default: throw UnsupportedError("determinants above dimension 3");
    }
}

void check_inputs(const ModelSpec& model, std::span<const double> x, std::span<const double> theta) {
    if (model.discrete) throw UnsupportedError("generalized fiducial density needs a continuous model");
    const int d = model.param_dim;
    if (static_cast<int>(theta.size()) != d) throw DomainError("theta has the wrong dimension");
    if (d > 3) throw UnsupportedError("parameter dimension above 3");
    if (static_cast<int>(x.size()) < d) throw DomainError("sample smaller than the parameter dimension");
    if (static_cast<int>(x.size()) > kGfdMaxSample) {
        throw UnsupportedError("subset enumeration is limited to samples of size " + std::to_string(kGfdMaxSample));
    }
}

// next d-subset of {0..n-1} in lexicographic order
bool next_subset(std::vector<int>& idx, int n) {
    const int d = static_cast<int>(idx.size());
    int i = d - 1;
    while (i >= 0 && idx[i] == n - d + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    return true;
}

}  // namespace

double log_jacobian_J(const ModelSpec& model, std::span<const double> x, std::span<const double> theta) {
    check_inputs(model, x, theta);
    const int n = static_cast<int>(x.size());
    const int d = model.param_dim;
    // rows dF/dtheta divided by f; zero-density points drop out
    std::vector<std::vector<double>> rows(n);
    std::vector<bool> alive(n, true);
    for (int i = 0; i < n; ++i) {
        double lf = obs_log_pdf(model, theta, x[i]);
        if (lf == -kInf) {
            alive[i] = false;
            continue;
        }
        rows[i] = obs_dcdf(model, theta, x[i]);
        for (double& v : rows[i]) v = v == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::fabs(v)) - lf), v);
    }
    std::vector<int> idx(d);
    for (int j = 0; j < d; ++j) idx[j] = j;
    double acc = -kInf;
    std::vector<std::vector<double>> m(d);
    do {
        bool ok = true;
        for (int j = 0; j < d; ++j) {
            if (!alive[idx[j]]) ok = false;
            else m[j] = rows[idx[j]];
        }
        if (!ok) continue;
        double v = std::fabs(det(m));
        if (v > 0.0) acc = log_sum_exp(acc, std::log(v));
    } while (next_subset(idx, n));
    return acc;
}

double jacobian_J(const ModelSpec& model, std::span<const double> x, std::span<const double> theta) {
    return std::exp(log_jacobian_J(model, x, theta));
}

double gfd_log_unnormalized(const ModelSpec& model, std::span<const double> x, std::span<const double> theta) {
    check_inputs(model, x, theta);
    double lf = 0.0;
    for (double xi : x) {
        lf += obs_log_pdf(model, theta, xi);
        if (lf == -kInf) return -kInf;
    }
    return lf + log_jacobian_J(model, x, theta);
}

double GfdResult::log_unnormalized(const ModelSpec& model, double theta) const {
    double t[1] = {theta};
    return gfd_log_unnormalized(model, sample, t);
}

Interval gfd_support(const ModelSpec& model, std::span<const double> x) {
    if (x.empty()) throw DomainError("empty sample");
    auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    switch (model.family) {
        case Family::UniformScale: return {*mx, kInf};
        case Family::UniformShift: return {*mx - 1.0, *mn};
        default: return model.param_space;
    }
}

GfdResult gfd_density(const ModelSpec& model, std::span<const double> x, double tol) {
    if (model.param_dim != 1) throw UnsupportedError("normalised density is provided for one-parameter models");
    double probe[1] = {model.param_space.contains(0.0) ? 0.0 : 1.0};
    check_inputs(model, x, probe);
    GfdResult res;
    res.sample.assign(x.begin(), x.end());
    Interval sup = gfd_support(model, x);

    // split at the median of the sufficient-statistic fiducial, a point in the bulk
    std::vector<double> breaks;
    if (sup.bounded()) {
        breaks.push_back(0.5 * (sup.lo + sup.hi));
    } else {
        double s = sufficient_statistic(model, x);
        breaks.push_back(fiducial_right(model, static_cast<int>(x.size()), s)->quantile(0.5));
    }
    ModelSpec mdl = model;
    std::vector<double> data = res.sample;
    auto logr = [mdl, data](double t) {
        double th[1] = {t};
        return gfd_log_unnormalized(mdl, data, th);
    };
    std::ostringstream name;
    name << "gfd " << model_key(model.family) << " n=" << x.size();
    try {
        res.density = std::make_shared<NumericDensity>(logr, sup, breaks, name.str(), tol);
    } catch (const ConvergenceError&) {
        throw DomainError("generalized fiducial density is not integrable for this sample");
    }
    res.log_normalizer = res.density->log_normalizer();
    return res;
}

GfdComparison compare_gfd_vs_stepwise(const ModelSpec& model, std::span<const double> x, double level,
                                      std::vector<double> grid) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("level must lie in (0, 1)");
    GfdResult r = gfd_density(model, x);
    const int n = static_cast<int>(x.size());
    FidPtr h = fiducial_right(model, n, sufficient_statistic(model, x));
    const double a = 0.5 * (1.0 - level);
    GfdComparison out;
    out.r_interval = {r.density->quantile(a), r.density->quantile(1.0 - a)};
    out.h_interval = {h->quantile(a), h->quantile(1.0 - a)};
    if (grid.empty()) {
        double lo = std::min(r.density->quantile(5e-4), h->quantile(5e-4));
        double hi = std::max(r.density->quantile(1.0 - 5e-4), h->quantile(1.0 - 5e-4));
        grid = Grid::uniform(lo, hi, 401).points();
    }
    for (double t : grid) {
        double R = r.density->cdf(t), H = h->cdf(t);
        out.rows.push_back({t, r.density->pdf(t), h->pdf(t), std::fabs(1.0 - 2.0 * R), std::fabs(1.0 - 2.0 * H)});
        out.cdf_gap = std::max(out.cdf_gap, std::fabs(R - H));
    }
    return out;
}

}  // namespace fid
