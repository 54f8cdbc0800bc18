#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mlt/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct ReportOutput {
  std::string report_path;
  bool table = false;
};

void emit_report(const mlt::RunReport& report, const ReportOutput& out) {
  if (out.table) std::cerr << mlt::format_table(report);
  std::string json = mlt::to_json(report).dump(2);
  if (out.report_path.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream(out.report_path) << json << "\n";
  }
}

void add_report_options(CLI::App* cmd, ReportOutput& out) {
  cmd->add_option("--report", out.report_path, "Write the JSON report here instead of stdout");
  cmd->add_flag("--table", out.table, "Also print an aligned table to stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meshlet compression toolkit"};
  app.require_subcommand(1);

  std::string input, output, lp_dir;
  mlt::CompressOptions options;
  ReportOutput compress_out;
  auto* compress = app.add_subcommand("compress", "Compress an OBJ mesh into an MLT1 container");
  compress->add_option("input", input, "Input OBJ")->required();
  compress->add_option("-o,--output", output, "Output container");
  compress
      ->add_option("--codec", options.codec, "Connectivity codec")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, mlt::Codec>{{"basic", mlt::Codec::kBasic},
                                            {"gts", mlt::Codec::kGts},
                                            {"gts-reuse", mlt::Codec::kGtsReuse}},
          CLI::ignore_case));
  compress
      ->add_option("--solver", options.solver, "Strip solver")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, mlt::SolverMode>{{"eta", mlt::SolverMode::kEta},
                                                 {"exact", mlt::SolverMode::kExact},
                                                 {"lp-export", mlt::SolverMode::kLpExport}},
          CLI::ignore_case));
  compress->add_option("--vmax", options.limits.max_vertices, "Vertices per meshlet")
      ->check(CLI::Range(3, 256));
  compress->add_option("--tmax", options.limits.max_triangles, "Triangles per meshlet")
      ->check(CLI::Range(1, 256));
  compress->add_option("--bits", options.bits, "Bits per attribute channel")->check(CLI::Range(1, 32));
  compress->add_option("--time-budget", options.time_budget_seconds, "Exact solver budget per meshlet, seconds")
      ->check(CLI::NonNegativeNumber);
  compress->add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber);
  compress->add_option("--lp-dir", lp_dir, "Directory for lp-export models (default: <input>.lp)");
  add_report_options(compress, compress_out);

  std::string container_path, verify_input;
  auto* verify = app.add_subcommand("verify", "Decode a container and check it against its source");
  verify->add_option("container", container_path, "MLT1 container")->required();
  verify->add_option("input", verify_input, "Source OBJ")->required();

  std::string manifest, solutions_dir, import_output;
  ReportOutput import_out;
  auto* import = app.add_subcommand("import-solutions", "Encode with externally solved strip models");
  import->add_option("manifest", manifest, "manifest.json written by lp-export")->required();
  import->add_option("solutions", solutions_dir, "Directory with meshlet_NNNNN.sol files")->required();
  import->add_option("-o,--output", import_output, "Output container");
  add_report_options(import, import_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (compress->parsed()) {
      mlt::TriangleMesh mesh = mlt::load_obj(input);
      if (options.solver == mlt::SolverMode::kLpExport) {
        std::filesystem::path dir = lp_dir.empty() ? std::filesystem::path(input + ".lp") : std::filesystem::path(lp_dir);
        auto exported = mlt::export_lp_models(mesh, input, options, dir);
        std::cerr << "wrote " << exported.models.size() << " models and " << exported.manifest.string() << "\n";
        return kOk;
      }
      auto result = mlt::compress(mesh, options);
      result.report.input = input;
      if (!output.empty()) mlt::write_container(result.container, output);
      emit_report(result.report, compress_out);
      return kOk;
    }
    if (verify->parsed()) {
      mlt::MeshletContainer container = mlt::read_container(container_path);
      mlt::TriangleMesh mesh = mlt::load_obj(verify_input);
      mlt::VerifyReport report = mlt::verify(container, mesh);
      std::cout << mlt::to_json(report).dump(2) << "\n";
      for (const auto& f : report.failures) std::cerr << "verify: " << f << "\n";
      return report.ok ? kOk : kFailure;
    }
    if (import->parsed()) {
      auto outcome = mlt::import_solutions(manifest, solutions_dir);
      for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
      if (!import_output.empty()) mlt::write_container(outcome.result.container, import_output);
      emit_report(outcome.result.report, import_out);
      return kOk;
    }
  } catch (const mlt::ObjParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const mlt::ContainerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
