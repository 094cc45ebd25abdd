#include "pwest/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "pwest/error.hpp"

namespace pwest {
namespace {

bool is_integer_exponent(double p) noexcept { return p == std::floor(p); }

double horner(std::span<const double> c, double x) noexcept {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> derivative(std::span<const double> c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
    return d;
}

std::vector<double> trimmed(std::span<const double> c) {
    std::vector<double> out(c.begin(), c.end());
    while (!out.empty() && out.back() == 0.0) out.pop_back();
    return out;
}

// Real roots of a polynomial on [lo, hi]. The polynomial is monotone between
// consecutive roots of its derivative, so each such bracket holds at most one
// root and plain bisection isolates it.
std::vector<double> real_roots(std::span<const double> coeffs, double lo, double hi) {
    auto c = trimmed(coeffs);
    std::vector<double> roots;
    if (c.size() <= 1) return roots;
    if (c.size() == 2) {
        double r = -c[0] / c[1];
        if (r >= lo && r <= hi) roots.push_back(r);
        return roots;
    }
    std::vector<double> knots{lo};
    for (double r : real_roots(derivative(c), lo, hi)) knots.push_back(r);
    knots.push_back(hi);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double x0 = knots[i];
        double x1 = knots[i + 1];
        double f0 = horner(c, x0);
        double f1 = horner(c, x1);
        if (f0 == 0.0) {
            roots.push_back(x0);
            continue;
        }
        if ((f0 < 0.0) == (f1 < 0.0) || f1 == 0.0) continue;
        for (int it = 0; it < 200 && x1 - x0 > 0.0; ++it) {
            double mid = 0.5 * (x0 + x1);
            if (mid <= x0 || mid >= x1) break;
            double fm = horner(c, mid);
            if ((fm < 0.0) == (f0 < 0.0)) {
                x0 = mid;
                f0 = fm;
            } else {
                x1 = mid;
            }
        }
        roots.push_back(0.5 * (x0 + x1));
    }
    if (horner(c, hi) == 0.0) roots.push_back(hi);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

// Extreme-value candidates of a polynomial segment: endpoints and critical points.
std::vector<double> polynomial_candidates(std::span<const double> coeffs, double a, double b) {
    std::vector<double> pts{a, b};
    for (double r : real_roots(derivative(coeffs), a, b)) pts.push_back(r);
    return pts;
}

std::vector<double> dense_coefficients(const Segment& s) {
    std::vector<double> c;
    for (const auto& t : s.terms) {
        auto deg = static_cast<std::size_t>(t.exponent);
        if (c.size() <= deg) c.resize(deg + 1, 0.0);
        c[deg] += t.coef;
    }
    return c;
}

bool is_polynomial(const Segment& s) noexcept {
    return std::all_of(s.terms.begin(), s.terms.end(),
                       [](const PowerTerm& t) { return is_integer_exponent(t.exponent); });
}

}  // namespace

double power_integral(double p, double a, double b) noexcept {
    if (b <= a) return 0.0;
    if (is_integer_exponent(p) && p >= 0.0) {
        // (b^{m+1} - a^{m+1}) / (m+1) = (b - a) * sum a^i b^{m-i} / (m+1)
        int m = static_cast<int>(p);
        double sum = 0.0;
        double ai = 1.0;
        for (int i = 0; i <= m; ++i) {
            sum += ai * std::pow(b, m - i);
            ai *= a;
        }
        return (b - a) * sum / (m + 1);
    }
    double q = p + 1.0;
    if (a == 0.0) return std::pow(b, q) / q;
    return std::pow(a, q) * std::expm1(q * std::log1p((b - a) / a)) / q;
}

double Segment::operator()(double x) const noexcept {
    double v = 0.0;
    for (const auto& t : terms) {
        if (t.exponent == 0.0) {
            v += t.coef;
        } else {
            v += t.coef * std::pow(x, t.exponent);
        }
    }
    return v;
}

double Segment::integral(double lo, double hi) const noexcept {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * power_integral(t.exponent, lo, hi);
    return v;
}

Intensity Intensity::piecewise(std::vector<PolynomialPiece> pieces) {
    Intensity f;
    f.kind_ = IntensityKind::piecewise_polynomial;
    std::sort(pieces.begin(), pieces.end(),
              [](const PolynomialPiece& l, const PolynomialPiece& r) { return l.a < r.a; });
    for (auto& p : pieces) {
        Segment s{p.a, p.b, {}};
        for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
            if (p.coeffs[i] != 0.0) s.terms.push_back({p.coeffs[i], static_cast<double>(i)});
        }
        f.segments_.push_back(std::move(s));
    }
    f.finalize();
    return f;
}

Intensity Intensity::power_spike(double beta) {
    require(beta > 0.0 && beta < 0.5, ErrorKind::invalid_model,
            "power spike exponent must lie in (0, 1/2), got " + std::to_string(beta));
    Intensity f;
    f.kind_ = IntensityKind::power_spike;
    f.spike_beta_ = beta;
    f.segments_.push_back(Segment{0.0, 1.0, {{1.0, -beta}}});
    f.finalize();
    return f;
}

Intensity Intensity::mixture(std::span<const double> weights, std::span<const Intensity> parts) {
    require(weights.size() == parts.size() && !parts.empty(), ErrorKind::invalid_model,
            "mixture needs one weight per component");
    std::vector<double> knots;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        require(weights[i] >= 0.0 && std::isfinite(weights[i]), ErrorKind::invalid_model,
                "mixture weights must be nonnegative");
        for (const auto& s : parts[i].segments_) {
            knots.push_back(s.a);
            knots.push_back(s.b);
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    Intensity f;
    f.kind_ = IntensityKind::mixture;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double lo = knots[i];
        double hi = knots[i + 1];
        std::map<double, double> by_exponent;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (weights[p] == 0.0) continue;
            for (const auto& s : parts[p].segments_) {
                if (s.a <= lo && hi <= s.b) {
                    for (const auto& t : s.terms) by_exponent[t.exponent] += weights[p] * t.coef;
                }
            }
        }
        Segment seg{lo, hi, {}};
        for (auto [e, c] : by_exponent) {
            if (c != 0.0) seg.terms.push_back({c, e});
        }
        if (!seg.terms.empty()) f.segments_.push_back(std::move(seg));
    }
    f.finalize();
    return f;
}

void Intensity::finalize() {
    require(!segments_.empty(), ErrorKind::invalid_model, "intensity needs at least one piece");
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& s = segments_[i];
        require(std::isfinite(s.a) && std::isfinite(s.b) && s.a < s.b, ErrorKind::invalid_model,
                "intensity pieces must be finite nonempty intervals");
        if (i > 0) {
            require(segments_[i - 1].b <= s.a, ErrorKind::invalid_model,
                    "intensity pieces must be disjoint");
        }
        for (const auto& t : s.terms) {
            require(std::isfinite(t.coef), ErrorKind::invalid_model, "non-finite coefficient");
            if (is_integer_exponent(t.exponent)) {
                require(t.exponent >= 0.0, ErrorKind::invalid_model,
                        "negative integer exponents are not integrable");
            } else {
                require(s.a >= 0.0, ErrorKind::invalid_model,
                        "fractional power terms need a nonnegative domain");
                require(s.a > 0.0 || t.exponent > -0.5, ErrorKind::invalid_model,
                        "power term is not square integrable at 0");
            }
        }
        if (is_polynomial(s)) {
            auto c = dense_coefficients(s);
            double scale = 0.0;
            double r = std::max({1.0, std::abs(s.a), std::abs(s.b)});
            for (std::size_t d = 0; d < c.size(); ++d) scale += std::abs(c[d]) * std::pow(r, d);
            for (double x : polynomial_candidates(c, s.a, s.b)) {
                require(horner(c, x) >= -1e-12 * scale, ErrorKind::invalid_model,
                        "intensity is negative near x = " + std::to_string(x));
            }
        } else {
            for (const auto& t : s.terms) {
                require(t.coef >= 0.0, ErrorKind::invalid_model,
                        "power terms must carry nonnegative weights");
            }
        }
    }
    cumulative_.assign(segments_.size() + 1, 0.0);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        double m = segments_[i].integral(segments_[i].a, segments_[i].b);
        cumulative_[i + 1] = cumulative_[i] + std::max(m, 0.0);
    }
    mass_ = cumulative_.back();
    require(std::isfinite(mass_) && mass_ > 0.0, ErrorKind::invalid_model,
            "intensity must have finite positive mass");
}

double Intensity::operator()(double x) const noexcept {
    if (x < support_lo() || x >= support_hi()) return 0.0;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const Segment& s) { return v < s.a; });
    if (it == segments_.begin()) return 0.0;
    const auto& s = *(it - 1);
    if (x >= s.b) return 0.0;
    return s(x);
}

double Intensity::l2_norm_squared() const {
    double total = 0.0;
    for (const auto& s : segments_) {
        for (const auto& t1 : s.terms) {
            for (const auto& t2 : s.terms) {
                total += t1.coef * t2.coef * power_integral(t1.exponent + t2.exponent, s.a, s.b);
            }
        }
    }
    return total;
}

double Intensity::sup_norm() const {
    double m = 0.0;
    for (const auto& s : segments_) {
        if (is_polynomial(s)) {
            auto c = dense_coefficients(s);
            for (double x : polynomial_candidates(c, s.a, s.b)) m = std::max(m, horner(c, x));
            continue;
        }
        for (const auto& t : s.terms) {
            if (t.exponent < 0.0 && s.a == 0.0) return kInfinity;
        }
        // Mixed fractional segments: endpoints plus a dense scan.
        constexpr int kScan = 1024;
        for (int i = 0; i <= kScan; ++i) {
            double x = s.a + (s.b - s.a) * i / kScan;
            m = std::max(m, s(x));
        }
    }
    return m;
}

double Intensity::integrate(double a, double b) const noexcept {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), a,
                               [](double v, const Segment& s) { return v < s.b; });
    for (; it != segments_.end() && it->a < b; ++it) {
        double lo = std::max(a, it->a);
        double hi = std::min(b, it->b);
        if (hi > lo) total += it->integral(lo, hi);
    }
    return total;
}

double Intensity::integrate(double a, double b, const StepFunction& weight) const noexcept {
    auto br = weight.breaks();
    auto vals = weight.values();
    double total = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] == 0.0) continue;
        double lo = std::max(a, br[i]);
        double hi = std::min(b, br[i + 1]);
        if (hi > lo) total += vals[i] * integrate(lo, hi);
    }
    return total;
}

double Intensity::integrate_squared(double a, double b) const noexcept {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), a,
                               [](double v, const Segment& s) { return v < s.b; });
    for (; it != segments_.end() && it->a < b; ++it) {
        double lo = std::max(a, it->a);
        double hi = std::min(b, it->b);
        if (!(hi > lo)) continue;
        for (const auto& t1 : it->terms) {
            for (const auto& t2 : it->terms) {
                total += t1.coef * t2.coef * power_integral(t1.exponent + t2.exponent, lo, hi);
            }
        }
    }
    return total;
}

double Intensity::cdf(double x) const noexcept {
    if (x <= support_lo()) return 0.0;
    if (x >= support_hi()) return 1.0;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const Segment& s) { return v < s.a; });
    std::size_t i = static_cast<std::size_t>(it - segments_.begin()) - 1;
    const auto& s = segments_[i];
    double partial = s.integral(s.a, std::min(x, s.b));
    return std::min(1.0, (cumulative_[i] + partial) / mass_);
}

double Intensity::inverse_cdf(double u) const {
    require(u >= 0.0 && u <= 1.0, ErrorKind::invalid_argument, "inverse_cdf needs u in [0, 1]");
    double target = u * mass_;
    auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), target);
    if (it == cumulative_.end()) return support_hi();
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const auto& s = segments_[i];
    double local = target - cumulative_[i];
    if (local <= 0.0) return s.a;

    if (s.terms.size() == 1) {
        const auto& t = s.terms.front();
        if (t.exponent == 0.0) return std::clamp(s.a + local / t.coef, s.a, s.b);
        if (s.a == 0.0) {
            double q = t.exponent + 1.0;
            return std::clamp(std::pow(q * local / t.coef, 1.0 / q), s.a, s.b);
        }
    }

    // Safeguarded Newton on the monotone partial integral.
    double lo = s.a;
    double hi = s.b;
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        double g = s.integral(s.a, x) - local;
        if (g == 0.0) return x;
        if (g > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        double slope = s(x);
        double next = (slope > 0.0 && std::isfinite(slope)) ? x - g / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            return next;
        }
        x = next;
    }
    return x;
}

}  // namespace pwest
