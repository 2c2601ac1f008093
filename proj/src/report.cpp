#include "elmfs/report.hpp"

#include "elmfs/config.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace elmfs {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const auto next = line.find(',', pos);
        out.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

template <typename T>
T parse_field(const std::string& s, const char* name) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument(std::string("csv: bad ") + name + " '" + s + "'");
    return v;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 1) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

} // namespace

void write_csv(const std::vector<ResultRecord>& records, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << to_string(r.method) << ',' << r.axis << ',' << format_double(r.axis_value) << ','
            << format_double(r.snr_db) << ',' << r.trials << ',' << r.sync_errors << ','
            << format_double(r.sync_error_prob()) << ',' << r.bits_total << ',' << r.bit_errors << ','
            << format_double(r.ber()) << ',' << r.seed << ',' << r.config_digest << '\n';
    }
}

void emit_csv(const std::vector<ResultRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("emit_csv: cannot open " + path.string());
    write_csv(records, out);
    if (!out) throw IoError("emit_csv: write failed for " + path.string());
}

std::vector<ResultRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::invalid_argument("csv: header does not match the result schema");
    std::vector<ResultRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 12) throw std::invalid_argument("csv: expected 12 fields, got " + std::to_string(f.size()));
        ResultRecord r;
        r.method = parse_method(f[0]);
        r.axis = f[1];
        r.axis_value = parse_field<double>(f[2], "axis_value");
        r.snr_db = parse_field<double>(f[3], "snr_db");
        r.trials = parse_field<std::int64_t>(f[4], "trials");
        r.sync_errors = parse_field<std::int64_t>(f[5], "sync_errors");
        r.bits_total = parse_field<std::int64_t>(f[7], "bits_total");
        r.bit_errors = parse_field<std::int64_t>(f[8], "bit_errors");
        r.seed = parse_field<std::uint64_t>(f[10], "seed");
        r.config_digest = f[11];
        if (r.sync_errors > r.trials || r.bit_errors > r.bits_total || r.sync_errors < 0 || r.bit_errors < 0)
            throw std::invalid_argument("csv: counts violate error <= total");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ResultRecord> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_csv: cannot open " + path.string());
    return read_csv(in);
}

std::string render_plot(const std::vector<ResultRecord>& records, PlotMetric metric) {
    if (records.empty()) throw std::invalid_argument("emit_plot: no records to plot");

    // Series keyed by (method, axis value), points sorted by SNR.
    std::map<std::pair<std::string, double>, std::vector<std::pair<double, double>>> series;
    const bool study = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.axis != "none"; });
    std::string axis_name;
    for (const auto& r : records) {
        if (!std::isfinite(r.snr_db)) continue;
        const double y = metric == PlotMetric::Ber ? r.ber() : r.sync_error_prob();
        std::string label(to_string(r.method));
        if (study) {
            axis_name = r.axis;
            label += " (" + r.axis + "=" + format_double(r.axis_value) + ")";
        }
        series[{label, r.axis_value}].emplace_back(r.snr_db, y);
    }
    if (series.empty()) throw std::invalid_argument("emit_plot: no finite-SNR records to plot");

    double x_min = 1e300, x_max = -1e300, y_min_pos = 1e300;
    for (auto& [key, pts] : series) {
        std::sort(pts.begin(), pts.end());
        for (auto [x, y] : pts) {
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            if (y > 0) y_min_pos = std::min(y_min_pos, y);
        }
    }
    if (x_max <= x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    const int decade_lo =
        y_min_pos < 1e300 ? std::min(-1, static_cast<int>(std::floor(std::log10(y_min_pos)))) : -4;
    const int decade_hi = 0;
    const double floor_value = std::pow(10.0, decade_lo);

    constexpr double kW = 760, kH = 500, kLeft = 70, kRight = 220, kTop = 40, kBottom = 60;
    const double pw = kW - kLeft - kRight;
    const double ph = kH - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
    auto py = [&](double y) {
        const double ly = std::log10(std::max(y, floor_value));
        return kTop + (decade_hi - ly) / (decade_hi - decade_lo) * ph;
    };

    static constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                       "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    static constexpr std::array<const char*, 3> kMarkers{"circle", "rect", "diamond"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const char* title = metric == PlotMetric::Ber ? "BER vs. SNR" : "Sync error probability vs. SNR";
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
        << (study ? " (" + xml_escape(axis_name) + " study)" : std::string{}) << "</text>\n";

    for (int d = decade_lo; d <= decade_hi; ++d) {
        const double y = py(std::pow(10.0, d));
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
            << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    std::vector<double> xticks;
    for (const auto& [key, pts] : series)
        for (auto [x, y] : pts) xticks.push_back(x);
    std::sort(xticks.begin(), xticks.end());
    xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
    for (double x : xticks) {
        svg << "<line x1=\"" << px(x) << "\" y1=\"" << kTop << "\" x2=\"" << px(x) << "\" y2=\"" << kTop + ph
            << "\" stroke=\"#eee\"/>\n";
        svg << "<text x=\"" << px(x) << "\" y=\"" << kTop + ph + 16 << "\" text-anchor=\"middle\">"
            << format_double(x) << "</text>\n";
    }
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 20 << "\" text-anchor=\"middle\">SNR (dB)</text>\n";
    svg << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << (metric == PlotMetric::Ber ? "BER" : "Error probability of FS") << "</text>\n";

    std::size_t idx = 0;
    for (const auto& [key, pts] : series) {
        const char* color = kColors[idx % kColors.size()];
        const char* marker = kMarkers[idx % kMarkers.size()];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : pts) svg << fixed(px(x), 2) << ',' << fixed(py(y), 2) << ' ';
        svg << "\"/>\n";
        for (auto [x, y] : pts) {
            const double cx = px(x), cy = py(y);
            if (std::string_view(marker) == "circle")
                svg << "<circle cx=\"" << fixed(cx, 2) << "\" cy=\"" << fixed(cy, 2) << "\" r=\"3\" fill=\"" << color
                    << "\"/>\n";
            else
                svg << "<rect x=\"" << fixed(cx - 3, 2) << "\" y=\"" << fixed(cy - 3, 2)
                    << "\" width=\"6\" height=\"6\" fill=\"" << color << "\""
                    << (std::string_view(marker) == "diamond"
                            ? " transform=\"rotate(45 " + fixed(cx, 2) + " " + fixed(cy, 2) + ")\""
                            : std::string{})
                    << "/>\n";
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(idx);
        svg << "<line x1=\"" << kLeft + pw + 14 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 38 << "\" y2=\""
            << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kLeft + pw + 44 << "\" y=\"" << ly + 4 << "\">" << xml_escape(key.first) << "</text>\n";
        ++idx;
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plot(const std::vector<ResultRecord>& records, const std::filesystem::path& path, PlotMetric metric) {
    const std::string text = render_plot(records, metric);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("emit_plot: cannot open " + path.string());
    out << text;
    if (!out) throw IoError("emit_plot: write failed for " + path.string());
}

namespace {

constexpr std::array<std::uint8_t, 5> kDatasetMagic{'E', 'L', 'M', 'D', 'S'};
constexpr std::uint8_t kDatasetVersion = 1;

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::istream& in, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) throw IoError("dataset file truncated");
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    return v;
}

} // namespace

void save_dataset(const TrainingSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("save_dataset: cannot open " + path.string());
    for (auto b : kDatasetMagic) out.put(static_cast<char>(b));
    out.put(static_cast<char>(kDatasetVersion));
    put_le(out, static_cast<std::uint64_t>(set.inputs.rows()), 4);
    put_le(out, static_cast<std::uint64_t>(set.inputs.cols()), 4);
    for (Eigen::Index c = 0; c < set.inputs.cols(); ++c)
        for (Eigen::Index r = 0; r < set.inputs.rows(); ++r)
            put_le(out, std::bit_cast<std::uint64_t>(set.inputs(r, c)), 8);
    for (Eigen::Index c = 0; c < set.labels.cols(); ++c) {
        Eigen::Index offset = 0;
        set.labels.col(c).maxCoeff(&offset);
        put_le(out, static_cast<std::uint64_t>(offset), 4);
    }
    if (!out) throw IoError("save_dataset: write failed for " + path.string());
}

TrainingSet load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_dataset: cannot open " + path.string());
    for (auto b : kDatasetMagic)
        if (get_le(in, 1) != b) throw IoError("dataset file: bad magic");
    if (get_le(in, 1) != kDatasetVersion) throw IoError("dataset file: unsupported version");
    const auto n = static_cast<int>(get_le(in, 4));
    const auto count = static_cast<Eigen::Index>(get_le(in, 4));
    TrainingSet set;
    set.inputs.resize(n, count);
    for (Eigen::Index c = 0; c < count; ++c)
        for (int r = 0; r < n; ++r) set.inputs(r, c) = std::bit_cast<double>(get_le(in, 8));
    std::vector<int> offsets(static_cast<std::size_t>(count));
    for (auto& o : offsets) o = static_cast<int>(get_le(in, 4));
    set.labels = one_hot_labels(offsets, n);
    return set;
}

} // namespace elmfs
