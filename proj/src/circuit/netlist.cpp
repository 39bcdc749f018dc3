#include "sizer/circuit/netlist.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <vector>

#include "sizer/util/error.hpp"
#include "sizer/util/json_io.hpp"

namespace sizer::circuit {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream ss{std::string(line)};
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string_view item = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

bool split_key_value(std::string_view tok, std::string_view& key, std::string_view& value) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == tok.size()) {
        return false;
    }
    key = tok.substr(0, eq);
    value = tok.substr(eq + 1);
    return true;
}

}  // namespace

double parse_quantity(std::string_view token) {
    static constexpr std::string_view kUnits[] = {"ohm", "m", "F"};
    for (std::string_view u : kUnits) {
        if (token.size() > u.size() && token.ends_with(u)) {
            token.remove_suffix(u.size());
            break;
        }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw std::invalid_argument("not a number: " + std::string(token));
    }
    return value;
}

NetlistDocument parse_netlist_document(std::string_view text, std::string default_name) {
    std::string name = std::move(default_name);
    std::vector<Component> components;
    std::vector<std::string> globals;
    std::vector<StageSpec> stages;
    ParamLines params;
    std::set<std::string> seen;
    std::vector<std::pair<std::size_t, std::string>> param_refs;
    std::vector<std::pair<std::size_t, std::string>> stage_refs;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const auto tok = split_ws(line);
        if (tok.empty()) {
            continue;
        }

        if (tok[0] == ".title") {
            if (tok.size() != 2) {
                throw ParseError(line_no, ".title takes exactly one name");
            }
            name = tok[1];
            continue;
        }
        if (tok[0] == ".global") {
            if (tok.size() < 2) {
                throw ParseError(line_no, ".global needs at least one net");
            }
            globals.insert(globals.end(), tok.begin() + 1, tok.end());
            continue;
        }
        if (tok[0] == ".stage") {
            if (tok.size() < 3) {
                throw ParseError(line_no, ".stage needs a name and driver=<components>");
            }
            StageSpec s;
            s.name = tok[1];
            for (std::size_t i = 2; i < tok.size(); ++i) {
                std::string_view key, value;
                if (!split_key_value(tok[i], key, value)) {
                    throw ParseError(line_no, "malformed stage field '" + tok[i] + "'");
                }
                if (key == "driver") {
                    s.drivers = split_list(value);
                } else if (key == "load") {
                    s.loads = split_list(value);
                } else {
                    throw ParseError(line_no, "unknown stage field '" + std::string(key) + "'");
                }
            }
            if (s.drivers.empty()) {
                throw ParseError(line_no, "stage " + s.name + " has no driver");
            }
            for (const auto* list : {&s.drivers, &s.loads}) {
                for (const std::string& c : *list) {
                    stage_refs.emplace_back(line_no, c);
                }
            }
            stages.push_back(std::move(s));
            continue;
        }
        if (tok[0] == "param") {
            if (tok.size() < 3) {
                throw ParseError(line_no, "param line needs a component and at least one key=value");
            }
            auto& entry = params[tok[1]];
            for (std::size_t i = 2; i < tok.size(); ++i) {
                std::string_view key, value;
                if (!split_key_value(tok[i], key, value)) {
                    throw ParseError(line_no, "malformed parameter '" + tok[i] + "'");
                }
                try {
                    entry[std::string(key)] = parse_quantity(value);
                } catch (const std::invalid_argument& e) {
                    throw ParseError(line_no, e.what());
                }
            }
            param_refs.emplace_back(line_no, tok[1]);
            continue;
        }
        if (tok[0].starts_with('.')) {
            throw ParseError(line_no, "unknown directive " + tok[0]);
        }

        if (tok.size() < 2) {
            throw ParseError(line_no, "component line needs a kind and nets");
        }
        const auto kind = kind_from_token(tok[1]);
        if (!kind) {
            throw ParseError(line_no, "unknown component kind '" + tok[1] + "'");
        }
        if (!seen.insert(tok[0]).second) {
            throw ParseError(line_no, "duplicate component name " + tok[0]);
        }
        Component c;
        c.id = components.size();
        c.kind = *kind;
        c.name = tok[0];
        for (std::size_t i = 2; i < tok.size(); ++i) {
            std::string_view key, value;
            if (tok[i].find('=') != std::string::npos) {
                if (!split_key_value(tok[i], key, value) || key != "group") {
                    throw ParseError(line_no, "unexpected attribute '" + tok[i] + "'");
                }
                if (c.matching_group) {
                    throw ParseError(line_no, "group given twice");
                }
                c.matching_group = std::string(value);
                continue;
            }
            if (c.matching_group) {
                throw ParseError(line_no, "net listed after group attribute");
            }
            c.nets.push_back(tok[i]);
        }
        if (c.nets.empty()) {
            throw ParseError(line_no, "component " + c.name + " has no nets");
        }
        components.push_back(std::move(c));
    }

    for (const auto& [ln, ref] : param_refs) {
        if (!seen.contains(ref)) {
            throw ParseError(ln, "param line for unknown component " + ref);
        }
    }
    for (const auto& [ln, ref] : stage_refs) {
        if (!seen.contains(ref)) {
            throw ParseError(ln, "stage references unknown component " + ref);
        }
    }
    if (components.empty()) {
        throw ParseError(line_no, "netlist has no components");
    }

    try {
        return NetlistDocument{CircuitTopology(std::move(name), std::move(components), std::move(globals),
                                               std::move(stages)),
                               std::move(params)};
    } catch (const ConfigError& e) {
        throw ParseError(line_no, e.what());
    }
}

CircuitTopology parse_netlist(std::string_view text, std::string default_name) {
    return parse_netlist_document(text, std::move(default_name)).topology;
}

NetlistDocument load_netlist_document(const std::filesystem::path& path) {
    return parse_netlist_document(read_text_file(path), path.stem().string());
}

}  // namespace sizer::circuit
