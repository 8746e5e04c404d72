#include "varsel/bench/figures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "varsel/errors.hpp"
#include "varsel/io_util.hpp"

namespace varsel::bench {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<double> parse_optional(const std::string& s) {
    if (s == "NA") return std::nullopt;
    return parse_double(s);
}

// Method palette, stable across figures.
const std::map<std::string, std::string>& palette() {
    static const std::map<std::string, std::string> colors = {
        {"BIC", "#1f77b4"},          {"AIC", "#ff7f0e"},
        {"GA_BIC", "#2ca02c"},       {"GA_AIC", "#d62728"},
        {"LASSO_BIC", "#9467bd"},    {"LASSO_AIC", "#8c564b"},
        {"LASSO_CV", "#e377c2"},     {"Stepwise_BIC", "#7f7f7f"},
        {"Stepwise_AIC", "#bcbd22"},
    };
    return colors;
}

std::string color_for(const std::string& method) {
    auto it = palette().find(method);
    return it != palette().end() ? it->second : "#17becf";
}

struct Layout {
    static constexpr double panel_w = 190;
    static constexpr double panel_h = 150;
    static constexpr double margin_left = 70;
    static constexpr double margin_top = 58;
    static constexpr double gap = 14;
    static constexpr double margin_right = 30;
    static constexpr double margin_bottom = 56;
};

double metric_value(const SummaryRow& r, const std::string& metric, bool& is_na) {
    is_na = false;
    if (metric == "cir") return r.cir;
    if (metric == "recall") return r.recall;
    if (r.fdr) return *r.fdr;
    is_na = true;
    return 0.0;
}

void render_metric_svg(const std::string& metric, const std::vector<SummaryRow>& rows,
                       const std::vector<double>& sigma2s, const std::vector<double>& rhos,
                       const std::vector<int>& ns, const std::vector<std::string>& methods,
                       std::ostream& out) {
    const std::size_t n_rows = sigma2s.size(), n_cols = rhos.size();
    const double width = Layout::margin_left + n_cols * Layout::panel_w +
                         (n_cols - 1) * Layout::gap + Layout::margin_right;
    const double height = Layout::margin_top + n_rows * Layout::panel_h +
                          (n_rows - 1) * Layout::gap + Layout::margin_bottom;

    const double log_lo = std::log2(static_cast<double>(ns.front()));
    const double log_hi = std::log2(static_cast<double>(ns.back()));
    const double log_span = std::max(log_hi - log_lo, 1e-9);

    // value lookup: (sigma2, rho, n, method) -> row
    std::map<std::string, const SummaryRow*> cell;
    auto key = [](double s2, double rho, int n, const std::string& m) {
        return format_double(s2) + "|" + format_double(rho) + "|" + std::to_string(n) +
               "|" + m;
    };
    for (const SummaryRow& r : rows) cell[key(r.sigma2, r.rho, r.n, r.method)] = &r;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << Layout::margin_left << "\" y=\"20\" font-size=\"15\">"
        << metric << " by sample size (columns: rho, rows: sigma2)</text>\n";

    // Legend.
    double lx = Layout::margin_left;
    for (const std::string& m : methods) {
        out << "<line x1=\"" << lx << "\" y1=\"34\" x2=\"" << lx + 16
            << "\" y2=\"34\" stroke=\"" << color_for(m) << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << lx + 20 << "\" y=\"38\" font-size=\"10\">" << m
            << "</text>\n";
        lx += 26 + 7.0 * m.size();
    }

    for (std::size_t si = 0; si < n_rows; ++si) {
        for (std::size_t ri = 0; ri < n_cols; ++ri) {
            const double px = Layout::margin_left + ri * (Layout::panel_w + Layout::gap);
            const double py = Layout::margin_top + si * (Layout::panel_h + Layout::gap);
            auto xpos = [&](int n) {
                return px + (std::log2(static_cast<double>(n)) - log_lo) / log_span *
                                Layout::panel_w;
            };
            auto ypos = [&](double v) { return py + (1.0 - v) * Layout::panel_h; };

            out << "<g class=\"panel\" data-sigma2=\"" << format_double(sigma2s[si])
                << "\" data-rho=\"" << format_double(rhos[ri]) << "\">\n";
            out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\""
                << Layout::panel_w << "\" height=\"" << Layout::panel_h
                << "\" fill=\"none\" stroke=\"#444\"/>\n";
            out << "<text x=\"" << px + 4 << "\" y=\"" << py + 12
                << "\" font-size=\"9\">rho=" << format_double(rhos[ri])
                << " sigma2=" << format_double(sigma2s[si]) << "</text>\n";

            // y ticks at 0, 0.5, 1; x ticks at each n (labels on edges only).
            for (double t : {0.0, 0.5, 1.0}) {
                out << "<line x1=\"" << px - 3 << "\" y1=\"" << ypos(t) << "\" x2=\""
                    << px << "\" y2=\"" << ypos(t) << "\" stroke=\"#444\"/>\n";
                if (ri == 0)
                    out << "<text x=\"" << px - 7 << "\" y=\"" << ypos(t) + 3
                        << "\" font-size=\"8\" text-anchor=\"end\">" << format_double(t)
                        << "</text>\n";
            }
            for (int n : ns) {
                out << "<line x1=\"" << xpos(n) << "\" y1=\"" << py + Layout::panel_h
                    << "\" x2=\"" << xpos(n) << "\" y2=\"" << py + Layout::panel_h + 3
                    << "\" stroke=\"#444\"/>\n";
                if (si == n_rows - 1)
                    out << "<text x=\"" << xpos(n) << "\" y=\"" << py + Layout::panel_h + 13
                        << "\" font-size=\"7\" text-anchor=\"middle\" "
                           "transform=\"rotate(45 "
                        << xpos(n) << " " << py + Layout::panel_h + 13 << ")\">" << n
                        << "</text>\n";
            }

            if (metric == "fdr") {
                for (double ref : {0.05, 0.10}) {
                    out << "<line x1=\"" << px << "\" y1=\"" << ypos(ref) << "\" x2=\""
                        << px + Layout::panel_w << "\" y2=\"" << ypos(ref)
                        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
                }
            }

            for (const std::string& m : methods) {
                // NA values split the line into segments and draw no marker.
                std::vector<std::pair<double, double>> segment;
                auto flush_segment = [&]() {
                    if (segment.size() >= 2) {
                        out << "<polyline fill=\"none\" stroke=\"" << color_for(m)
                            << "\" stroke-width=\"1.5\" points=\"";
                        for (auto& [x, y] : segment) out << x << "," << y << " ";
                        out << "\"/>\n";
                    }
                    segment.clear();
                };
                for (int n : ns) {
                    auto it = cell.find(key(sigma2s[si], rhos[ri], n, m));
                    if (it == cell.end()) {
                        flush_segment();
                        continue;
                    }
                    bool is_na = false;
                    const double v = metric_value(*it->second, metric, is_na);
                    if (is_na) {
                        flush_segment();
                        continue;
                    }
                    segment.emplace_back(xpos(n), ypos(std::clamp(v, 0.0, 1.0)));
                    out << "<circle class=\"pt\" cx=\"" << xpos(n) << "\" cy=\""
                        << ypos(std::clamp(v, 0.0, 1.0)) << "\" r=\"2\" fill=\""
                        << color_for(m) << "\"/>\n";
                }
                flush_segment();
            }
            out << "</g>\n";
        }
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
        << "\" font-size=\"11\" text-anchor=\"middle\">n (log scale)</text>\n";
    out << "</svg>\n";
}

} // namespace

std::vector<SummaryRow> read_summary_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open " + file.string());
    std::vector<SummaryRow> rows;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty summary file " + file.string());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv(line);
        if (f.size() != 12) throw Error("bad summary row: " + line);
        SummaryRow r;
        r.study = f[0];
        r.family = f[1];
        r.n = static_cast<int>(parse_int(f[2]));
        r.rho = parse_double(f[3]);
        r.sigma2 = parse_double(f[4]);
        r.method = f[5];
        r.n_replicates = static_cast<int>(parse_int(f[6]));
        r.cir = parse_double(f[7]);
        r.recall = parse_double(f[8]);
        r.fdr = parse_optional(f[9]);
        r.fdr_pooled = parse_optional(f[10]);
        r.n_null_selected = static_cast<int>(parse_int(f[11]));
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("summary file has no data rows: " + file.string());
    return rows;
}

RenderResult render_figures(const fs::path& results_dir) {
    const std::vector<SummaryRow> rows = read_summary_csv(results_dir / "summary.csv");

    std::set<double> sigma2_set, rho_set;
    std::set<int> n_set;
    std::vector<std::string> methods; // first-appearance order
    for (const SummaryRow& r : rows) {
        sigma2_set.insert(r.sigma2);
        rho_set.insert(r.rho);
        n_set.insert(r.n);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
    }
    const std::vector<double> sigma2s(sigma2_set.begin(), sigma2_set.end());
    const std::vector<double> rhos(rho_set.begin(), rho_set.end());
    const std::vector<int> ns(n_set.begin(), n_set.end());

    RenderResult result;

    // Absent grid points, relative to the observed axis cross-product.
    std::set<std::string> present;
    for (const SummaryRow& r : rows)
        present.insert(format_double(r.sigma2) + "|" + format_double(r.rho) + "|" +
                       std::to_string(r.n) + "|" + r.method);
    for (double s2 : sigma2s)
        for (double rho : rhos)
            for (int n : ns)
                for (const std::string& m : methods) {
                    const std::string k = format_double(s2) + "|" + format_double(rho) +
                                          "|" + std::to_string(n) + "|" + m;
                    if (!present.count(k))
                        result.warnings.push_back(
                            "missing cell: sigma2=" + format_double(s2) +
                            " rho=" + format_double(rho) + " n=" + std::to_string(n) +
                            " method=" + m);
                }

    for (const std::string metric : {"cir", "recall", "fdr"}) {
        const fs::path file = results_dir / (metric + ".svg");
        std::ofstream out(file);
        render_metric_svg(metric, rows, sigma2s, rhos, ns, methods, out);
        result.files.push_back(file);
    }

    // Tidy CSV of everything plotted.
    const fs::path data_file = results_dir / "figures_data.csv";
    {
        std::ofstream out(data_file);
        out << "metric,study,family,sigma2,rho,n,method,value\n";
        for (const std::string metric : {"cir", "recall", "fdr"}) {
            for (const SummaryRow& r : rows) {
                bool is_na = false;
                const double v = metric_value(r, metric, is_na);
                out << metric << ',' << r.study << ',' << r.family << ','
                    << format_double(r.sigma2) << ',' << format_double(r.rho) << ','
                    << r.n << ',' << r.method << ',' << (is_na ? "NA" : format_double(v))
                    << "\n";
            }
        }
    }
    result.files.push_back(data_file);
    return result;
}

} // namespace varsel::bench
