#include "wavekin/quadrature.hpp"

#include "wavekin/common.hpp"
#include "wavekin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace wavekin {

std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    if (n < 2) {
        throw DomainError("linspace needs at least two points");
    }
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

} // namespace wavekin

namespace wavekin::quadrature {

namespace {

constexpr unsigned kMaxDepth = 20;

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options)
{
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("integration limits must be finite");
    }
    if (a == b) {
        return {};
    }
    if (b < a) {
        Options flipped = options;
        Result r = integrate(f, b, a, flipped);
        return {-r.value, r.error};
    }

    std::vector<double> cuts{a};
    for (double p : options.breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    Result total;
    double l1_total = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c];
        const double hi = cuts[c + 1];
        std::size_t pieces = 1;
        if (std::isfinite(options.max_piece) && options.max_piece > 0.0) {
            pieces = static_cast<std::size_t>(std::ceil((hi - lo) / options.max_piece));
            pieces = std::max<std::size_t>(pieces, 1);
        }
        const double width = (hi - lo) / static_cast<double>(pieces);
        for (std::size_t p = 0; p < pieces; ++p) {
            const double x0 = lo + width * static_cast<double>(p);
            const double x1 = (p + 1 == pieces) ? hi : lo + width * static_cast<double>(p + 1);
            double err = 0.0;
            double l1 = 0.0;
            const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                f, x0, x1, kMaxDepth, options.rel_tol, &err, &l1);
            total.value += v;
            total.error += err;
            l1_total += l1;
        }
    }

    if (!std::isfinite(total.value) || !std::isfinite(total.error)) {
        throw QuadratureError(fmt::format("integral over [{}, {}] is not finite", a, b),
                              total.error);
    }
    // Kronrod error estimates are pessimistic; allow a modest margin before
    // declaring failure.
    const double allowed = 100.0 * options.rel_tol * std::max(l1_total, 1e-300);
    if (total.error > allowed) {
        throw QuadratureError(
            fmt::format("quadrature over [{}, {}] did not converge: error estimate {:.3e}, "
                        "allowed {:.3e}",
                        a, b, total.error, allowed),
            total.error);
    }
    return total;
}

} // namespace wavekin::quadrature
