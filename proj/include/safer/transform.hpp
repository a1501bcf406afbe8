#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "safer/core.hpp"

namespace safer {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

} // namespace detail

/// A strictly increasing concave map on the nonnegative utils axis. Either
/// power form y -> y^(1/t) with t >= 1, or piecewise linear with positive
/// nonincreasing slopes. Models an increase in risk aversion.
struct ConcaveTransform {
    enum class Kind { power, piecewise_linear };

    Kind kind = Kind::power;
    double t = 1.0;               // power only
    double intercept = 0.0;       // pwl: value at y = 0
    std::vector<double> kinks;    // pwl: strictly increasing, all > 0
    std::vector<double> slopes;   // pwl: kinks.size() + 1 entries

    static ConcaveTransform power(double t) {
        if (!(t >= 1.0)) throw Error("power transform requires t >= 1");
        ConcaveTransform f;
        f.kind = Kind::power;
        f.t = t;
        return f;
    }

    static ConcaveTransform piecewise(double intercept, std::vector<double> kinks,
                                      std::vector<double> slopes) {
        if (slopes.size() != kinks.size() + 1)
            throw Error("piecewise transform needs one slope per segment");
        if (!(intercept >= 0.0)) throw Error("piecewise transform intercept must be >= 0");
        for (std::size_t i = 0; i < kinks.size(); ++i) {
            if (!(kinks[i] > 0.0)) throw Error("piecewise transform kinks must be positive");
            if (i && !(kinks[i] > kinks[i - 1]))
                throw Error("piecewise transform kinks must be strictly increasing");
        }
        for (std::size_t i = 0; i < slopes.size(); ++i) {
            if (!(slopes[i] > 0.0)) throw Error("piecewise transform slopes must be positive");
            if (i && slopes[i] > slopes[i - 1])
                throw Error("piecewise transform slopes must be nonincreasing (concavity)");
        }
        ConcaveTransform f;
        f.kind = Kind::piecewise_linear;
        f.intercept = intercept;
        f.kinks = std::move(kinks);
        f.slopes = std::move(slopes);
        return f;
    }

    static ConcaveTransform identity() { return power(1.0); }

    static ConcaveTransform affine(double slope, double intercept) {
        return piecewise(intercept, {}, {slope});
    }

    /// y -> min{y, k*y + c} for k in (0,1), c >= 0. Kink sits at c/(1-k).
    static ConcaveTransform min_affine(double k, double c) {
        if (!(k > 0.0 && k < 1.0)) throw Error("min_affine requires k in (0,1)");
        if (!(c >= 0.0)) throw Error("min_affine requires c >= 0");
        if (c == 0.0) return piecewise(0.0, {}, {k}); // the cap binds everywhere
        return piecewise(0.0, {c / (1.0 - k)}, {1.0, k});
    }

    double operator()(double y) const {
        if (kind == Kind::power) return t == 1.0 ? y : std::pow(y, 1.0 / t);
        double v = intercept;
        double prev = 0.0;
        for (std::size_t i = 0; i < kinks.size(); ++i) {
            if (y <= kinks[i]) return v + slopes[i] * (y - prev);
            v += slopes[i] * (kinks[i] - prev);
            prev = kinks[i];
        }
        return v + slopes.back() * (y - prev);
    }

    /// Round-trippable description, e.g. "power t=2" or
    /// "pwl i=0;k=4;s=1,0.5".
    std::string describe() const {
        if (kind == Kind::power) return "power t=" + detail::fmt_double(t);
        std::string s = "pwl i=" + detail::fmt_double(intercept) + ";k=";
        for (std::size_t i = 0; i < kinks.size(); ++i)
            s += (i ? "," : "") + detail::fmt_double(kinks[i]);
        s += ";s=";
        for (std::size_t i = 0; i < slopes.size(); ++i)
            s += (i ? "," : "") + detail::fmt_double(slopes[i]);
        return s;
    }

    static ConcaveTransform parse(const std::string& text);
};

namespace detail {

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        std::string tok = s.substr(pos, next - pos);
        if (!tok.empty()) {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw Error("bad number in transform spec: \"" + tok + "\"");
            out.push_back(v);
        }
        pos = next + 1;
    }
    return out;
}

} // namespace detail

inline ConcaveTransform ConcaveTransform::parse(const std::string& text) {
    if (text == "identity") return identity();
    if (text.rfind("power", 0) == 0) {
        auto eq = text.find("t=");
        if (eq == std::string::npos) throw Error("power transform spec needs t=<value>");
        return power(std::stod(text.substr(eq + 2)));
    }
    if (text.rfind("pwl", 0) == 0) {
        double intercept = 0.0;
        std::vector<double> kinks, slopes;
        std::size_t pos = 3;
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == ':')) ++pos;
        std::string body = text.substr(pos);
        std::size_t at = 0;
        while (at < body.size()) {
            std::size_t semi = body.find(';', at);
            if (semi == std::string::npos) semi = body.size();
            std::string field = body.substr(at, semi - at);
            auto eq = field.find('=');
            if (eq == std::string::npos) throw Error("bad pwl transform field: \"" + field + "\"");
            std::string key = field.substr(0, eq), val = field.substr(eq + 1);
            if (key == "i")
                intercept = std::stod(val);
            else if (key == "k")
                kinks = detail::parse_double_list(val);
            else if (key == "s")
                slopes = detail::parse_double_list(val);
            else
                throw Error("unknown pwl transform field \"" + key + "\"");
            at = semi + 1;
        }
        return piecewise(intercept, std::move(kinks), std::move(slopes));
    }
    throw Error("unrecognized transform spec \"" + text + "\" (expected power:t=<v> or pwl:...)");
}

} // namespace safer
