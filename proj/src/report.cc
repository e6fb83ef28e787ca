#include "lodcov/report.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "lodcov/csv.h"
#include "lodcov/error.h"

namespace lodcov {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

ReferenceTaxonomy load_labelled_languages(const std::string &path,
                                          const Catalog *catalog,
                                          const MappingTable *mappings,
                                          const std::string &label_column) {
  Table table = Table::read_file(path);
  std::optional<std::size_t> key_col = table.column("wals_code");
  bool external_keys = false;
  if (!key_col) key_col = table.column("language");
  if (!key_col) {
    key_col = table.column("code");
    external_keys = true;
  }
  if (!key_col) {
    throw Error(ErrorKind::kSchema,
                path + ": needs a wals_code, language or code column");
  }
  std::optional<std::size_t> label_col;
  if (!label_column.empty()) {
    label_col = table.require_column(label_column);
  } else {
    for (const char *name : {"category", "class", "label"}) {
      if ((label_col = table.column(name))) break;
    }
  }
  if (!label_col) {
    throw Error(ErrorKind::kSchema, path + ": needs a category, class or label column");
  }
  auto name_col = table.column("class_name");

  ReferenceTaxonomy tax;
  for (const auto &row : table.rows()) {
    std::string key = trim(row[*key_col]);
    std::string label_text = trim(row[*label_col]);
    if (key.empty()) continue;
    int label = 0;
    try {
      std::size_t used = 0;
      label = std::stoi(label_text, &used);
      if (used != label_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw Error(ErrorKind::kParse,
                  path + ": label '" + label_text + "' for '" + key + "' is not an integer");
    }
    std::string code;
    if (!external_keys && (!catalog || catalog->contains(key))) {
      code = key;
    } else if (catalog && mappings) {
      if (const Languoid *l = resolve_code(*catalog, *mappings, key)) code = l->wals_code;
    } else if (!catalog) {
      code = key;
    }
    if (code.empty()) {
      ++tax.unresolved;
      continue;
    }
    auto [it, inserted] = tax.partition.labels.emplace(code, label);
    if (!inserted) it->second = std::max(it->second, label);
    if (name_col) {
      std::string name = trim(row[*name_col]);
      if (!name.empty()) tax.class_names.emplace(label, name);
    }
  }
  return tax;
}

PartitionComparison compare_partitions(const Partition &categorization,
                                       const Partition &reference,
                                       NmiNormalization norm) {
  AlignedLabels common = intersect_partitions(categorization, reference);
  if (common.keys.empty()) {
    throw Error(ErrorKind::kEmptyIntersection,
                "categorization and reference share no language");
  }
  PartitionComparison out;
  out.ari = adjusted_rand_index(common.a, common.b);
  out.nmi = normalized_mutual_information(common.a, common.b, norm);
  out.intersection = common.keys.size();
  out.first_size = categorization.labels.size();
  out.second_size = reference.labels.size();
  out.coverage_ratio =
      static_cast<double>(out.intersection) / static_cast<double>(out.first_size);
  return out;
}

namespace {

std::string language_name(const ReportBundle &bundle, const std::string &code) {
  auto it = bundle.language_names.find(code);
  return it == bundle.language_names.end() ? std::string() : it->second;
}

std::string category_name(const ReportBundle &bundle, int category) {
  auto it = bundle.class_names.find(category);
  if (it != bundle.class_names.end() && bundle.k == kDefaultCategories) return it->second;
  return "Category " + std::to_string(category);
}

json optional_real(const std::optional<double> &v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json comparison_json(const std::optional<PartitionComparison> &c) {
  if (!c) return nullptr;
  return {{"ari", c->ari},
          {"nmi", c->nmi},
          {"intersection", c->intersection},
          {"coverage_ratio", c->coverage_ratio}};
}

std::string html_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Figure palette: 0 green ... 5 red.
const char *category_color(int category) {
  static const char *kColors[] = {"#3b9a3b", "#3a6fb0", "#8a4fa3",
                                  "#e3c21a", "#f08a24", "#d62f2f",
                                  "#6b6b6b", "#1aa3a3", "#a36b1a"};
  constexpr int n = sizeof(kColors) / sizeof(kColors[0]);
  return kColors[((category % n) + n) % n];
}

std::string scatter_svg(const ProfileRun &run, const ReportBundle &bundle) {
  const double width = 640, height = 440, left = 60, right = 20, top = 20, bottom = 50;
  const FeatureMatrix &m = run.matrix;
  std::size_t ycol = m.values.cols() > 1 ? 1 : 0;
  double max_x = 1.0, max_y = 1.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    max_x = std::max(max_x, m.values(i, 0));
    max_y = std::max(max_y, m.values(i, ycol));
  }
  max_x = std::ceil(max_x);
  max_y = std::ceil(max_y);
  auto px = [&](double x) { return left + x / max_x * (width - left - right); };
  auto py = [&](double y) { return height - bottom - y / max_y * (height - top - bottom); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << width - right
      << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << py(0) << "\" x2=\"" << left
      << "\" y2=\"" << top << "\" stroke=\"black\"/>\n";
  int step_x = std::max(1, static_cast<int>(max_x / 8));
  for (int t = 0; t <= max_x; t += step_x) {
    svg << "<text x=\"" << px(t) << "\" y=\"" << py(0) + 16
        << "\" font-size=\"11\" text-anchor=\"middle\">" << t << "</text>\n";
  }
  int step_y = std::max(1, static_cast<int>(max_y / 8));
  for (int t = 0; t <= max_y; t += step_y) {
    svg << "<text x=\"" << left - 6 << "\" y=\"" << py(t) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << t << "</text>\n";
  }
  std::string xlabel = m.variables.empty() ? "x" : m.variables[0].name;
  std::string ylabel = m.variables.size() > 1 ? m.variables[1].name : xlabel;
  svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">ln(1 + " << html_escape(xlabel)
      << ")</text>\n";
  svg << "<text x=\"14\" y=\"" << (top + height - bottom) / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (top + height - bottom) / 2 << ")\">ln(1 + " << html_escape(ylabel)
      << ")</text>\n";

  if (run.trend) {
    double x0 = 0, x1 = max_x;
    double y0 = run.trend->intercept, y1 = run.trend->intercept + run.trend->slope * max_x;
    svg << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1)
        << "\" y2=\"" << py(y1)
        << "\" stroke=\"#555\" stroke-dasharray=\"4 3\" clip-path=\"url(#plot)\"/>\n";
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::string &code = m.languages[i];
    int cat = run.kmeans.categorization.labels.at(code);
    svg << "<circle cx=\"" << format_real(px(m.values(i, 0))) << "\" cy=\""
        << format_real(py(m.values(i, ycol))) << "\" r=\"3.5\" fill=\""
        << category_color(cat) << "\" fill-opacity=\"0.8\"><title>"
        << html_escape(code) << ' ' << html_escape(language_name(bundle, code))
        << " (" << cat << ")</title></circle>\n";
  }
  svg << "<defs><clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top
      << "\" width=\"" << width - left - right << "\" height=\""
      << height - top - bottom << "\"/></clipPath></defs>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string categorization_csv(const ProfileRun &run, const ReportBundle &bundle) {
  std::ostringstream out;
  out << "language,name,category,quantile_category,zero_coverage,score\n";
  for (std::size_t i = 0; i < run.matrix.rows(); ++i) {
    const std::string &code = run.matrix.languages[i];
    out << csv_escape(code) << ',' << csv_escape(language_name(bundle, code)) << ','
        << run.kmeans.categorization.labels.at(code) << ','
        << run.quantile.labels.at(code) << ','
        << (run.matrix.zero_coverage_mask[i] ? "true" : "false") << ','
        << format_real(run.scores[i]) << '\n';
  }
  return out.str();
}

std::string scatter_csv(const ProfileRun &run, const ReportBundle &bundle) {
  std::ostringstream out;
  out << "language,name,x,y,category\n";
  std::size_t ycol = run.matrix.values.cols() > 1 ? 1 : 0;
  for (std::size_t i = 0; i < run.matrix.rows(); ++i) {
    const std::string &code = run.matrix.languages[i];
    out << csv_escape(code) << ',' << csv_escape(language_name(bundle, code)) << ','
        << format_real(run.matrix.values(i, 0)) << ','
        << (ycol ? format_real(run.matrix.values(i, ycol)) : std::string()) << ','
        << run.kmeans.categorization.labels.at(code) << '\n';
  }
  return out.str();
}

std::string divergence_csv(const ProfileRun &run) {
  std::ostringstream out;
  out << "language,residual,divergence\n";
  for (const auto &row : run.divergence) {
    out << csv_escape(row.language) << ','
        << (row.residual ? format_real(*row.residual) : std::string()) << ','
        << row.divergence << '\n';
  }
  return out.str();
}

std::string metrics_json(const ReportBundle &bundle) {
  json doc;
  doc["k"] = bundle.k;
  doc["runs"] = json::object();
  for (const auto &run : bundle.runs) {
    json r;
    r["languages"] = run.matrix.rows();
    r["zero_coverage"] = run.kmeans.zero_group.size();
    r["variables"] = json::array();
    for (const auto &v : run.matrix.variables) r["variables"].push_back(v.name);
    r["kmeans_categories"] = run.kmeans.categorization.num_categories();
    if (run.kmeans.model) {
      r["inertia"] = run.kmeans.model->inertia;
      r["iterations"] = run.kmeans.model->iterations_run;
    }
    r["silhouette"] = optional_real(run.silhouette);
    r["variance_ratio"] = optional_real(run.variance_ratio);
    r["variance_ratio_perfect_separation"] =
        run.variance_ratio && is_perfect_separation(*run.variance_ratio);
    r["quantile_categories"] = run.quantile.num_categories();
    r["quantile_boundaries"] = run.quantile.boundaries.value_or(std::vector<double>{});
    r["reference"] = comparison_json(run.reference);
    r["kmeans_vs_quantile"] = comparison_json(run.kmeans_vs_quantile);
    if (run.trend) {
      r["trend"] = {{"slope", run.trend->slope},
                    {"intercept", run.trend->intercept},
                    {"threshold", run.trend->threshold}};
    } else {
      r["trend"] = nullptr;
    }
    r["notes"] = run.notes;
    doc["runs"][run.name] = r;
  }
  return doc.dump(2) + "\n";
}

std::string report_html(const ReportBundle &bundle) {
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>Language coverage profile</title>\n<style>\n"
       << "body{font-family:sans-serif;margin:2em;color:#222}"
       << "table{border-collapse:collapse}td,th{padding:2px 8px;border-bottom:1px solid #ddd}"
       << ".swatch{display:inline-block;width:12px;height:12px;border-radius:6px;"
       << "margin-right:6px;vertical-align:middle}\n</style>\n</head>\n<body>\n"
       << "<h1>Language coverage (log-log scale)</h1>\n";

  std::set<int> categories;
  for (const auto &run : bundle.runs) {
    for (const auto &[code, c] : run.kmeans.categorization.labels) categories.insert(c);
  }
  html << "<p>";
  for (auto it = categories.rbegin(); it != categories.rend(); ++it) {
    html << "<span class=\"swatch\" style=\"background:" << category_color(*it)
         << "\"></span>" << html_escape(category_name(bundle, *it)) << "&nbsp;&nbsp;";
  }
  html << "</p>\n";

  for (const auto &run : bundle.runs) {
    html << "<h2>" << html_escape(run.name) << "</h2>\n";
    html << scatter_svg(run, bundle);
    html << "<table>\n<tr><th>languages</th><td>" << run.matrix.rows()
         << "</td></tr>\n<tr><th>zero coverage</th><td>" << run.kmeans.zero_group.size()
         << "</td></tr>\n";
    auto row = [&](const char *label, const std::optional<double> &v) {
      html << "<tr><th>" << label << "</th><td>"
           << (v ? format_real(*v) : std::string("n/a")) << "</td></tr>\n";
    };
    row("silhouette", run.silhouette);
    row("variance ratio", run.variance_ratio);
    if (run.reference) {
      row("ARI vs reference", run.reference->ari);
      row("NMI vs reference", run.reference->nmi);
    }
    if (run.trend) {
      row("trend slope", run.trend->slope);
      row("trend intercept", run.trend->intercept);
    }
    html << "</table>\n";
  }
  html << "</body>\n</html>\n";
  return html.str();
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

std::vector<std::string> write_report_bundle(const ReportBundle &bundle,
                                             const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto emit = [&](const std::string &name, const std::string &content) {
    std::string path = (fs::path(dir) / name).string();
    write_text_file(path, content);
    written.push_back(path);
  };
  for (const auto &run : bundle.runs) {
    emit("categorization_" + run.name + ".csv", categorization_csv(run, bundle));
    emit("scatter_" + run.name + ".csv", scatter_csv(run, bundle));
    if (!run.divergence.empty()) {
      emit("divergence_" + run.name + ".csv", divergence_csv(run));
    }
  }
  emit("metrics.json", metrics_json(bundle));
  emit("report.html", report_html(bundle));
  return written;
}

}  // namespace lodcov
