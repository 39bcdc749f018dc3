#include "sizer/baselines/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sizer/util/error.hpp"

namespace sizer::baselines {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
T parse_field(const std::string& text, std::size_t line, int base = 10) {
    T value{};
    const char* end = text.data() + text.size();
    std::from_chars_result res;
    if constexpr (std::is_floating_point_v<T>) {
        res = std::from_chars(text.data(), end, value);
    } else {
        res = std::from_chars(text.data(), end, value, base);
    }
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(line, "bad trace field '" + text + "'");
    }
    return value;
}

}  // namespace

const TraceEntry& SearchTrace::record(double fom, std::uint64_t design_hash) {
    TraceEntry e;
    e.step = entries_.size() + 1;
    e.fom = fom;
    e.best_fom = entries_.empty() ? fom : std::max(entries_.back().best_fom, fom);
    e.design_hash = design_hash;
    entries_.push_back(e);
    return entries_.back();
}

double SearchTrace::best_fom() const noexcept {
    return entries_.empty() ? -std::numeric_limits<double>::infinity() : entries_.back().best_fom;
}

std::vector<double> SearchTrace::best_so_far() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        out.push_back(e.best_fom);
    }
    return out;
}

void SearchTrace::write_csv(const std::filesystem::path& path) const {
    std::ostringstream os;
    os << "step,fom,best_fom,design_hash\n";
    for (const auto& e : entries_) {
        os << e.step << ',' << format_double(e.fom) << ',' << format_double(e.best_fom) << ','
           << params::hash_hex(e.design_hash) << '\n';
    }
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write trace " + path.string());
    }
    out << os.str();
}

SearchTrace SearchTrace::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read trace " + path.string());
    }
    SearchTrace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            if (line != "step,fom,best_fom,design_hash") {
                throw ParseError(lineno, "unexpected trace header");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (fields.size() != 4) {
            throw ParseError(lineno, "expected 4 trace fields");
        }
        TraceEntry e;
        e.step = parse_field<std::size_t>(fields[0], lineno);
        e.fom = parse_field<double>(fields[1], lineno);
        e.best_fom = parse_field<double>(fields[2], lineno);
        e.design_hash = parse_field<std::uint64_t>(fields[3], lineno, 16);
        trace.entries_.push_back(e);
    }
    return trace;
}

void SearchResult::observe(const params::DesignPoint& design, double fom) {
    trace.record(fom, design.hash());
    if (fom > best_fom) {
        best_fom = fom;
        best_design = design;
    }
}

}  // namespace sizer::baselines
