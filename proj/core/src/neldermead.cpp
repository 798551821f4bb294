#include "fixsynth/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fixsynth/error.hpp"

namespace fixsynth {

void SimplexConfig::validate() const {
    if (!(alpha > 0) || !(gamma > 1) || !(rho > 0 && rho < 1) || !(sigma > 0 && sigma < 1) || !(tol >= 0) ||
        max_iters < 0) {
        throw Error(ErrorCode::ConfigError, "invalid Nelder-Mead parameters");
    }
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    }
    return true;
}

void Box::project(std::vector<double>& x) const {
    for (size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Vertex {
    std::vector<double> x;
    double f;
};

}  // namespace

MaximizeResult maximize(const Objective& f, const Box& box, std::vector<double> x0, const SimplexConfig& cfg) {
    cfg.validate();
    const size_t n = box.dim();
    if (box.hi.size() != n || x0.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "start point and box dimensions differ");
    }
    MaximizeResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        double v = kNegInf;
        try {
            v = f(x);
        } catch (const std::exception&) {
            v = kNegInf;
        }
        return std::isnan(v) ? kNegInf : v;
    };
    for (size_t i = 0; i < n; ++i) {
        if (!(box.lo[i] <= box.hi[i])) throw Error(ErrorCode::InvalidArgument, "box has lo > hi");
    }
    if (!box.contains(x0)) throw Error(ErrorCode::InvalidArgument, "start point lies outside the box");

    bool degenerate = true;
    for (size_t i = 0; i < n; ++i) degenerate = degenerate && box.hi[i] == box.lo[i];
    if (n == 0 || degenerate) {
        res.f = eval(x0);
        res.x = std::move(x0);
        return res;
    }

    std::vector<Vertex> s;
    s.reserve(n + 1);
    s.push_back({x0, eval(x0)});
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        const double width = box.hi[i] - box.lo[i];
        const double h = std::max(0.05 * width, 1e-4);
        x[i] = x0[i] + h <= box.hi[i] ? x0[i] + h : x0[i] - h;
        box.project(x);
        s.push_back({x, eval(x)});
    }

    const int max_iters = cfg.max_iters > 0 ? cfg.max_iters : static_cast<int>(200 * n);
    auto by_f = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };
    std::vector<double> c(n);
    auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
        std::vector<double> x(n);
        for (size_t i = 0; i < n; ++i) x[i] = from[i] + t * (to[i] - from[i]);
        box.project(x);
        return x;
    };

    while (true) {
        std::stable_sort(s.begin(), s.end(), by_f);
        double diameter = 0.0;
        for (size_t k = 1; k <= n; ++k) {
            for (size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::fabs(s[k].x[i] - s[0].x[i]));
        }
        const double spread = s[0].f - s[n].f;
        const bool flat = std::isfinite(spread) ? spread <= cfg.tol : s[0].f == s[n].f;
        if ((diameter <= cfg.tol && flat) || res.iterations >= max_iters) break;
        ++res.iterations;

        std::fill(c.begin(), c.end(), 0.0);
        for (size_t k = 0; k < n; ++k) {
            for (size_t i = 0; i < n; ++i) c[i] += s[k].x[i];
        }
        for (double& ci : c) ci /= static_cast<double>(n);
        const Vertex& worst = s[n];

        std::vector<double> xr = along(c, worst.x, -cfg.alpha);
        const double fr = eval(xr);
        if (fr > s[0].f) {
            std::vector<double> xe = along(c, xr, cfg.gamma);
            const double fe = eval(xe);
            if (fe > fr) {
                s[n] = {std::move(xe), fe};
            } else {
                s[n] = {std::move(xr), fr};
            }
            continue;
        }
        if (fr > s[n - 1].f) {
            s[n] = {std::move(xr), fr};
            continue;
        }
        if (fr > worst.f) {
            std::vector<double> xc = along(c, xr, cfg.rho);
            const double fc = eval(xc);
            if (fc >= fr) {
                s[n] = {std::move(xc), fc};
                continue;
            }
        } else {
            std::vector<double> xc = along(c, worst.x, cfg.rho);
            const double fc = eval(xc);
            if (fc > worst.f) {
                s[n] = {std::move(xc), fc};
                continue;
            }
        }
        for (size_t k = 1; k <= n; ++k) {
            s[k].x = along(s[0].x, s[k].x, cfg.sigma);
            s[k].f = eval(s[k].x);
        }
    }
    std::stable_sort(s.begin(), s.end(), by_f);
    res.x = std::move(s[0].x);
    res.f = s[0].f;
    return res;
}

}  // namespace fixsynth
