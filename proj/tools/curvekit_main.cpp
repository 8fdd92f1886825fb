#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "curvekit/cli.hpp"

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

void emit_json_errors(std::ostream& out, const std::vector<std::string>& msgs) {
  out << "{\"error\":{\"kind\":\"config\",\"messages\":[";
  for (size_t i = 0; i < msgs.size(); ++i) {
    if (i) out << ',';
    out << '"' << escape(msgs[i]) << '"';
  }
  out << "]}}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "curvekit: Frenet and equi-affine invariants of curves in "
      "three-dimensional pseudo-Riemannian spaces"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON job description")
        ->required();
    sub->add_option("--out", out_path,
                    "output file (overrides the config; default stdout)");
    sub->add_option("--format", format, "csv or json (overrides the config)");
  };
  CLI::App* inv = app.add_subcommand(
      "invariants",
      "tabulate curvature, torsion and the equi-affine curvatures on a grid");
  CLI::App* chk = app.add_subcommand(
      "check", "run the self-consistency identities and report pass/fail");
  CLI::App* rep = app.add_subcommand(
      "reparam",
      "reparametrize by (pseudo-)arc length and report unit-speed residuals");
  add_common(inv);
  add_common(chk);
  add_common(rep);

  CLI11_PARSE(app, argc, argv);

  const bool json_mode = format == "json";
  if (!format.empty() && format != "csv" && format != "json") {
    std::cerr << "config error: --format must be csv or json\n";
    return 1;
  }

  curvekit::JobConfig config;
  try {
    config = curvekit::parse_config_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    if (json_mode) emit_json_errors(std::cout, {e.what()});
    return 1;
  }
  if (!format.empty()) config.output.format = format;
  if (!out_path.empty()) config.output.path = out_path;

  const auto violations = curvekit::validate_config(config);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "config error: " << v << "\n";
    if (config.output.format == "json") emit_json_errors(std::cout, violations);
    return 1;
  }

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config.output.path.empty()) {
    file.open(config.output.path);
    if (!file) {
      std::cerr << "config error: cannot open output path '"
                << config.output.path << "'\n";
      return 1;
    }
    out = &file;
  }

  int (*fn)(const curvekit::JobConfig&, std::ostream&, std::ostream&) = nullptr;
  if (inv->parsed()) {
    fn = curvekit::cmd_invariants;
  } else if (chk->parsed()) {
    fn = curvekit::cmd_check;
  } else {
    fn = curvekit::cmd_reparam;
  }
  try {
    return fn(config, *out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
