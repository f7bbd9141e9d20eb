#include "kpsa/tntp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace kpsa {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

void strip_comment(std::string& line) {
    if (std::size_t pos = line.find('~'); pos != std::string::npos) line.erase(pos);
}

// Tag lines `<NAME> value` until `<END OF METADATA>`; keys uppercased.
std::map<std::string, std::string> read_metadata(std::istream& in) {
    std::map<std::string, std::string> tags;
    std::string line;
    while (std::getline(in, line)) {
        strip_comment(line);
        std::string text = trim(line);
        if (text.empty()) continue;
        if (text.front() != '<') {
            throw ParseError("unexpected content before <END OF METADATA>: " + text);
        }
        std::size_t close = text.find('>');
        if (close == std::string::npos) {
            throw ParseError("unterminated metadata tag: " + text);
        }
        std::string tag = upper(trim(text.substr(1, close - 1)));
        if (tag == "END OF METADATA") return tags;
        tags[tag] = trim(text.substr(close + 1));
    }
    throw ParseError("missing metadata tag <END OF METADATA>");
}

const std::string& require_tag(const std::map<std::string, std::string>& tags,
                               const std::string& name) {
    auto it = tags.find(name);
    if (it == tags.end()) throw ParseError("missing metadata tag <" + name + ">");
    return it->second;
}

long parse_long(const std::string& token, const std::string& what) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("non-numeric " + what + ": '" + token + "'");
    }
    return value;
}

double parse_double(const std::string& token, const std::string& what) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError("non-numeric " + what + ": '" + token + "'");
    }
    return value;
}

long tag_long(const std::map<std::string, std::string>& tags, const std::string& name) {
    return parse_long(require_tag(tags, name), "value of <" + name + ">");
}

// Remaining stream content as whitespace tokens, with comments stripped and
// the given separator characters treated as whitespace.
std::vector<std::string> body_tokens(std::istream& in, std::string_view separators) {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        strip_comment(line);
        for (char& c : line) {
            if (separators.find(c) != std::string_view::npos) c = ' ';
        }
        std::istringstream parts(line);
        std::string token;
        while (parts >> token) tokens.push_back(std::move(token));
    }
    return tokens;
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void check_sink(const std::ostream& out, const std::string& what) {
    if (!out) throw IoError("write failure while emitting " + what);
}

nlohmann::ordered_json report_json(const AssignmentReport& report) {
    nlohmann::ordered_json doc;
    doc["schema"] = 1;
    doc["instance"] = report.instance;
    doc["k"] = report.k;
    doc["E_percent"] = report.e_percent;
    if (report.pearson_r) {
        doc["pearson_r"] = *report.pearson_r;
        doc["ue_grade"] = report.ue_grade;
    } else {
        doc["pearson_r"] = "n/a";
    }
    doc["od_count"] = report.od_count;
    doc["degenerate_od_count"] = report.degenerate_od_count;
    doc["cpu_ms"] = report.cpu_ms;
    doc["cpu_s"] = report.cpu_ms / 1000.0;
    doc["report_ms"] = report.report_ms;
    auto& bins = doc["histogram"] = nlohmann::ordered_json::array();
    for (const HistogramBin& bin : report.histogram) {
        nlohmann::ordered_json row;
        row["lo"] = bin.lo;
        if (std::isinf(bin.hi)) {
            row["hi"] = nullptr;
        } else {
            row["hi"] = bin.hi;
        }
        row["count"] = bin.count;
        row["rel_freq"] = bin.rel_freq;
        bins.push_back(std::move(row));
    }
    auto& schedule = doc["schedule"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.config.schedule.size(); ++i) {
        nlohmann::ordered_json row;
        row["paths"] = static_cast<int>(i) + 2;
        row["iterations"] = report.config.schedule[i].iterations;
        row["alpha"] = report.config.schedule[i].alpha;
        schedule.push_back(std::move(row));
    }
    return doc;
}

}  // namespace

Network parse_network(std::istream& in) {
    auto tags = read_metadata(in);
    long node_count = tag_long(tags, "NUMBER OF NODES");
    long link_count = tag_long(tags, "NUMBER OF LINKS");
    long first_thru = tag_long(tags, "FIRST THRU NODE");
    long zones = tags.count("NUMBER OF ZONES") ? tag_long(tags, "NUMBER OF ZONES") : 0;

    auto tokens = body_tokens(in, ";");
    constexpr std::size_t kFields = 10;
    if (tokens.size() % kFields != 0) {
        throw ParseError("malformed link row: field count is not a multiple of 10");
    }
    std::size_t rows = tokens.size() / kFields;
    if (rows != static_cast<std::size_t>(link_count)) {
        throw ParseError("link row count " + std::to_string(rows) +
                         " does not match declared " + std::to_string(link_count));
    }

    std::vector<Link> links;
    links.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string* f = &tokens[r * kFields];
        Link link;
        link.tail = static_cast<NodeId>(parse_long(f[0], "tail node"));
        link.head = static_cast<NodeId>(parse_long(f[1], "head node"));
        link.capacity = parse_double(f[2], "capacity");
        link.length = parse_double(f[3], "length");
        link.free_flow_time = parse_double(f[4], "free flow time");
        link.bpr_b = parse_double(f[5], "b coefficient");
        link.bpr_power = parse_double(f[6], "power");
        link.speed_limit = parse_double(f[7], "speed");
        link.toll = parse_double(f[8], "toll");
        link.link_type = static_cast<int>(std::llround(parse_double(f[9], "link type")));
        links.push_back(link);
    }
    try {
        return Network::build(static_cast<int>(node_count), std::move(links),
                              static_cast<NodeId>(first_thru), static_cast<int>(zones));
    } catch (const InvalidInputError& e) {
        throw ParseError(e.what());
    }
}

DemandMatrix parse_trips(std::istream& in) {
    auto tags = read_metadata(in);
    long zones = tag_long(tags, "NUMBER OF ZONES");
    bool has_total = tags.count("TOTAL OD FLOW") > 0;
    double declared_total =
        has_total ? parse_double(require_tag(tags, "TOTAL OD FLOW"), "total OD flow") : 0.0;

    auto check_zone = [zones](long zone, const char* what) {
        if (zone < 1 || zone > zones) {
            throw ParseError(std::string(what) + " " + std::to_string(zone) +
                             " references a zone beyond the declared " +
                             std::to_string(zones));
        }
    };

    DemandMatrix demand;
    double raw_total = 0.0;
    long origin = 0;
    auto tokens = body_tokens(in, ";:");
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (upper(tokens[i]) == "ORIGIN") {
            if (i + 1 >= tokens.size()) throw ParseError("origin block missing its zone id");
            origin = parse_long(tokens[i + 1], "origin zone");
            check_zone(origin, "origin");
            i += 2;
            continue;
        }
        if (origin == 0) throw ParseError("trip entry before the first origin block");
        if (i + 1 >= tokens.size()) throw ParseError("trip entry missing its demand value");
        long dest = parse_long(tokens[i], "destination zone");
        check_zone(dest, "destination");
        double q = parse_double(tokens[i + 1], "demand");
        raw_total += q;
        try {
            demand.add(static_cast<NodeId>(origin), static_cast<NodeId>(dest), q);
        } catch (const InvalidInputError& e) {
            throw ParseError(e.what());
        }
        i += 2;
    }
    demand.normalize();

    if (has_total) {
        double scale = std::max(1.0, std::abs(declared_total));
        if (std::abs(raw_total - declared_total) > 1e-6 * scale) {
            throw ParseError("parsed demand total " + format_double(raw_total) +
                             " does not match declared " + format_double(declared_total));
        }
    }
    return demand;
}

ParsedInstance load_instance(const std::string& net_path, const std::string& trips_path,
                             std::string name) {
    std::ifstream net_file(net_path);
    if (!net_file) throw IoError("cannot open network file: " + net_path);
    std::ifstream trips_file(trips_path);
    if (!trips_file) throw IoError("cannot open trips file: " + trips_path);

    if (name.empty()) {
        name = std::filesystem::path(net_path).stem().string();
        if (name.size() > 4 && name.ends_with("_net")) name.resize(name.size() - 4);
    }

    ParsedInstance instance;
    instance.network = parse_network(net_file);
    instance.demand = parse_trips(trips_file);
    instance.name = std::move(name);
    return instance;
}

void write_flows(const Network& network, const LinkState& state, std::ostream& out) {
    if (state.flow.size() != network.links.size() ||
        state.time.size() != network.links.size()) {
        throw InvalidInputError("link state does not match the network");
    }
    for (std::size_t a = 0; a < network.links.size(); ++a) {
        const Link& link = network.links[a];
        out << link.tail << '\t' << link.head << '\t' << format_double(state.flow[a])
            << '\t' << format_double(state.time[a]) << '\n';
    }
    check_sink(out, "flows");
}

void write_report(const AssignmentReport& report, ReportFormat format, std::ostream& out) {
    if (format == ReportFormat::json) {
        out << report_json(report).dump(2) << '\n';
        check_sink(out, "report");
        return;
    }
    out << "lo,hi,count,rel_freq\n";
    for (const HistogramBin& bin : report.histogram) {
        out << format_double(bin.lo) << ',' << format_double(bin.hi) << ',' << bin.count
            << ',' << format_double(bin.rel_freq) << '\n';
    }
    out << "instance," << report.instance << '\n';
    out << "k," << report.k << '\n';
    out << "E_percent," << format_double(report.e_percent) << '\n';
    out << "pearson_r," << (report.pearson_r ? format_double(*report.pearson_r) : "n/a")
        << '\n';
    out << "ue_grade," << (report.ue_grade.empty() ? "n/a" : report.ue_grade) << '\n';
    out << "od_count," << report.od_count << '\n';
    out << "degenerate_od_count," << report.degenerate_od_count << '\n';
    out << "cpu_ms," << format_double(report.cpu_ms) << '\n';
    out << "cpu_s," << format_double(report.cpu_ms / 1000.0) << '\n';
    out << "report_ms," << format_double(report.report_ms) << '\n';
    check_sink(out, "report");
}

void write_scatter_csv(const AssignmentReport& report, std::ostream& out) {
    out << "avg_time,shortest_time\n";
    for (const OdMetric& m : report.od_metrics) {
        out << format_double(m.avg_time) << ',' << format_double(m.shortest_time) << '\n';
    }
    check_sink(out, "scatter data");
}

void write_histogram_csv(const AssignmentReport& report, std::ostream& out) {
    out << "lo,hi,count,rel_freq\n";
    for (const HistogramBin& bin : report.histogram) {
        out << format_double(bin.lo) << ',' << format_double(bin.hi) << ',' << bin.count
            << ',' << format_double(bin.rel_freq) << '\n';
    }
    check_sink(out, "histogram");
}

}  // namespace kpsa
