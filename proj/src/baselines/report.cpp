#include "sizer/baselines/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "sizer/util/error.hpp"

namespace sizer::baselines {

namespace {

std::string num(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string MergedCurves::to_csv() const {
    std::ostringstream os;
    os << "step";
    for (const auto& n : names) {
        os << ',' << n;
    }
    os << ",max\n";
    for (std::size_t s = 0; s < steps(); ++s) {
        os << s + 1;
        for (const auto& c : curves) {
            os << ',' << num(c[s]);
        }
        os << ',' << num(max_curve[s]) << '\n';
    }
    return os.str();
}

MergedCurves merge_traces(const std::vector<SearchTrace>& traces, const std::vector<std::string>& names) {
    if (traces.empty()) {
        throw ConfigError("no traces to merge");
    }
    if (names.size() != traces.size()) {
        throw ConfigError("one name per trace is required");
    }
    std::size_t longest = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].empty()) {
            throw ConfigError("trace '" + names[i] + "' has no entries");
        }
        longest = std::max(longest, traces[i].size());
    }
    MergedCurves m;
    m.names = names;
    for (const auto& t : traces) {
        auto c = t.best_so_far();
        c.resize(longest, c.back());
        m.curves.push_back(std::move(c));
    }
    m.max_curve = m.curves.front();
    for (const auto& c : m.curves) {
        for (std::size_t s = 0; s < longest; ++s) {
            m.max_curve[s] = std::max(m.max_curve[s], c[s]);
        }
    }
    return m;
}

std::string render_svg(const std::vector<std::vector<double>>& curves, const std::vector<std::string>& labels,
                       const std::string& title) {
    constexpr double width = 640;
    constexpr double height = 400;
    constexpr double left = 70;
    constexpr double right = 20;
    constexpr double top = 40;
    constexpr double bottom = 50;

    std::size_t steps = 1;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& c : curves) {
        steps = std::max(steps, c.size());
        for (double v : c) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0;
        hi = 1;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    auto x_of = [&](std::size_t i) { return left + pw * (steps > 1 ? double(i) / double(steps - 1) : 0.0); };
    auto y_of = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"16\">" << escape_xml(title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
       << "\" stroke=\"black\"/>\n";
    const auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        os << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(text) << "</text>\n";
    };
    label(left - 6, top + 4, num(hi), "end");
    label(left - 6, top + ph + 4, num(lo), "end");
    label(left, top + ph + 18, "1", "middle");
    label(left + pw, top + ph + 18, std::to_string(steps), "middle");
    label(left + pw / 2, height - 10, "step", "middle");

    for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto& c = curves[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (std::isfinite(c[i])) {
                os << x_of(i) << ',' << y_of(c[i]) << ' ';
            }
        }
        os << "\"/>\n";
        if (k < labels.size()) {
            const double ly = top + 14.0 * double(k + 1);
            os << "<text x=\"" << left + pw - 4 << "\" y=\"" << ly
               << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colour << "\">"
               << escape_xml(labels[k]) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace sizer::baselines
