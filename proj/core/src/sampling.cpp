#include <cmath>

#include "fixsynth/program.hpp"

namespace fixsynth {

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<Point> sample_domain(const std::vector<Interval>& doms, Rng& rng, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be at least 1");
    std::vector<Point> out;
    out.reserve(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        Point pt(doms.size());
        for (size_t k = 0; k < doms.size(); ++k) {
            const double lo = doms[k].lower_in();
            const double hi = doms[k].upper_in();
            pt[k] = doms[k].clamp(lo + rng.uniform01() * (hi - lo));
        }
        out.push_back(std::move(pt));
    }
    return out;
}

std::vector<Point> sample_domain(const std::vector<Interval>& doms, std::uint64_t seed, int n) {
    Rng rng(seed);
    return sample_domain(doms, rng, n);
}

IwlRule parse_iwl_rule(std::string_view s) {
    if (s == "log2") return IwlRule::Log2;
    if (s == "log2p1") return IwlRule::Log2PlusOne;
    throw Error(ErrorCode::InvalidArgument, "unknown iwl rule '" + std::string(s) + "'");
}

const char* to_string(IwlRule r) { return r == IwlRule::Log2 ? "log2" : "log2p1"; }

int iwl_for(double maxabs, IwlRule rule) {
    if (!(maxabs > 0)) return 0;
    if (rule == IwlRule::Log2PlusOne) {
        return std::max(0, static_cast<int>(std::ceil(std::log2(maxabs + 1.0))));
    }
    // maxabs = m * 2^ex with m in [0.5, 1). ceil(log2(maxabs)) is ex except at
    // exact powers of two, where it is ex - 1 and the +1 bump restores ex.
    int ex = 0;
    std::frexp(maxabs, &ex);
    return std::max(0, ex);
}

std::vector<VarLayout> infer_layout(const Program& p, const std::vector<Point>& samples, IwlRule rule) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "infer_layout needs a nonempty sample set");
    std::vector<VarLayout> out(p.size());
    for (const Point& pt : samples) {
        const FloatTrace tr = eval_float(p, pt);
        for (size_t i = 0; i < p.size(); ++i) {
            const double v = tr.values[i];
            if (v < 0) out[i].is_signed = true;
            out[i].maxabs = std::max(out[i].maxabs, std::fabs(v));
        }
    }
    for (VarLayout& l : out) l.iwl = iwl_for(l.maxabs, rule);
    return out;
}

}  // namespace fixsynth
