// silvec: vectorize binary silhouettes and refine Bezier outlines.
//
//   silvec vectorize shape.png -o shape.svg
//   silvec refine shape.png traced.svg -o refined.svg
//   silvec metrics shape.png traced.svg --format table
//   silvec overlay shape.png shape.svg -o overlay.svg

#include <silvec/pipeline.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Args {
  std::string image;
  std::string svg_in;
  std::string output;
  std::string format = "json";
  std::vector<std::string> w_segments;
  silvec::PipelineOptions opts;
  bool no_refine = false;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw silvec::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw silvec::Error("cannot write " + path);
  out << text;
  out.close();
  if (!out) throw silvec::Error("failed writing " + path);
}

// "idx=value" pairs for --w-segment.
void apply_w_segments(Args& a) {
  for (const auto& spec : a.w_segments) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw silvec::ParameterError("--w-segment expects idx=value, got '" + spec + "'");
    std::size_t used = 0, used_w = 0;
    long idx = -1;
    double w = 0.0;
    try {
      idx = std::stol(spec.substr(0, eq), &used);
      w = std::stod(spec.substr(eq + 1), &used_w);
    } catch (const std::exception&) {
      throw silvec::ParameterError("--w-segment expects idx=value, got '" + spec + "'");
    }
    if (used != eq || used_w != spec.size() - eq - 1 || idx < 0)
      throw silvec::ParameterError("--w-segment expects idx=value, got '" + spec + "'");
    a.opts.refine.w_overrides[static_cast<std::size_t>(idx)] = w;
  }
}

void add_raster_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--threshold", a.opts.threshold, "gray level; darker pixels are foreground")
      ->capture_default_str()
      ->check(CLI::Range(0, 255));
  cmd->add_flag("--invert", a.opts.invert, "treat light pixels as foreground");
}

void add_vectorizer_flags(CLI::App* cmd, Args& a) {
  auto& v = a.opts.vectorizer;
  cmd->add_option("--max-dist", v.max_dist, "max distance before inserting a regular point (px)")->capture_default_str();
  cmd->add_option("--min-length", v.min_length, "minimum spacing between nodes (px)")->capture_default_str();
  cmd->add_option("--sigma", v.sigma, "chord length for cornerness (px)")->capture_default_str();
  cmd->add_option("--kappa-min", v.kappa_min, "cornerness threshold")->capture_default_str();
  cmd->add_option("--seed-nodes", v.seed_nodes, "regular nodes placed on curves without corners")->capture_default_str();
}

void add_refine_flags(CLI::App* cmd, Args& a) {
  auto& r = a.opts.refine;
  cmd->add_option("--w", r.w_default, "length weight for every segment")->capture_default_str();
  cmd->add_option("--w-segment", a.w_segments, "per-segment weight idx=value (repeatable)");
  cmd->add_option("--r-alpha", r.r_alpha, "tangent search radius (degrees)")->capture_default_str();
  cmd->add_option("--stop-rel", r.stop_rel, "relative energy decrease that ends the sweeps")->capture_default_str();
  cmd->add_option("--max-sweeps", r.max_sweeps, "sweep limit")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, Args& a) {
  cmd->add_option("--format", a.format, "report format")->capture_default_str()->check(CLI::IsMember({"json", "table"}));
}

std::string report_name(const std::string& path) { return std::filesystem::path(path).stem().string(); }

void print_report(const Args& a, const silvec::PipelineResult& r, bool comparison) {
  if (a.format == "table") {
    std::cout << silvec::report_table(r, report_name(a.image));
  } else {
    std::cout << (comparison ? silvec::comparison_json(r) : silvec::metrics_json(r)).dump(2) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Silhouette vectorization and Bezier refinement"};
  app.require_subcommand(1);
  Args a;

  auto* vec = app.add_subcommand("vectorize", "trace a raster silhouette and refine the outline");
  vec->add_option("image", a.image, "PNG or PGM input")->required();
  vec->add_option("-o,--output", a.output, "SVG output")->required();
  vec->add_flag("--no-refine", a.no_refine, "stop after the curvature vectorization");
  add_raster_flags(vec, a);
  add_vectorizer_flags(vec, a);
  add_refine_flags(vec, a);
  add_format_flag(vec, a);

  auto* ref = app.add_subcommand("refine", "refine an existing SVG outline of the silhouette");
  ref->add_option("image", a.image, "PNG or PGM input")->required();
  ref->add_option("svg", a.svg_in, "initial outline")->required();
  ref->add_option("-o,--output", a.output, "SVG output")->required();
  add_raster_flags(ref, a);
  add_refine_flags(ref, a);
  add_format_flag(ref, a);

  auto* met = app.add_subcommand("metrics", "distances between an SVG outline and the silhouette");
  met->add_option("image", a.image, "PNG or PGM input")->required();
  met->add_option("svg", a.svg_in, "outline")->required();
  add_raster_flags(met, a);
  add_format_flag(met, a);

  auto* ovl = app.add_subcommand("overlay", "draw curve, outline and nodes into one SVG");
  ovl->add_option("image", a.image, "PNG or PGM input")->required();
  ovl->add_option("svg", a.svg_in, "outline")->required();
  ovl->add_option("-o,--output", a.output, "SVG output")->required();
  add_raster_flags(ovl, a);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_w_segments(a);
    a.opts.refine_enabled = !a.no_refine;
    const silvec::Silhouette sil = silvec::load_silhouette(a.image, a.opts);
    if (vec->parsed()) {
      const auto r = silvec::vectorize_silhouette(sil, a.opts);
      write_text(a.output, silvec::result_svg(r));
      print_report(a, r, true);
    } else if (ref->parsed()) {
      const auto r = silvec::refine_silhouette(sil, read_text(a.svg_in), a.opts);
      write_text(a.output, silvec::result_svg(r));
      print_report(a, r, true);
    } else if (met->parsed()) {
      const auto r = silvec::measure_silhouette(sil, read_text(a.svg_in), a.opts);
      print_report(a, r, false);
    } else if (ovl->parsed()) {
      write_text(a.output, silvec::overlay_svg(sil, read_text(a.svg_in)));
    }
  } catch (const std::exception& e) {
    std::cerr << "silvec: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
