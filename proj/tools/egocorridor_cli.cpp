// Command line front end: synth, generate, oracle, evaluate, overlay.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "egocorridor/image_io.hpp"
#include "egocorridor/pipeline.hpp"
#include "egocorridor/synth.hpp"

namespace fs = std::filesystem;
using namespace egocorridor;

namespace {

struct StageFlags {
  std::string config_path;
  std::optional<double> step;
  std::optional<double> max_range;
  bool no_shift = false;
  bool no_objects = false;
  bool no_occlusion = false;
  bool no_elevation = false;
  bool no_tilt = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON pipeline config; flags override it");
    app->add_option("--step", step, "boundary resampling step [m]");
    app->add_option("--max-range", max_range, "corridor length limit [m]");
    app->add_flag("--no-shift", no_shift, "ignore the lateral shift profile");
    app->add_flag("--no-objects", no_objects, "skip object cutoffs");
    app->add_flag("--no-occlusion", no_occlusion, "skip occlusion removal");
    app->add_flag("--no-elevation", no_elevation, "project onto flat ground");
    app->add_flag("--no-tilt", no_tilt, "disable tilt compensation");
  }

  PipelineConfig resolve() const {
    PipelineConfig c = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (step) c.resample_step = *step;
    if (max_range) c.max_range = *max_range;
    if (no_shift) c.enable_shift = false;
    if (no_objects) c.enable_objects = false;
    if (no_occlusion) c.enable_occlusion = false;
    if (no_elevation) c.enable_elevation = false;
    if (no_tilt) c.enable_tilt = false;
    validate(c);
    return c;
  }
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError:
    case ErrorKind::UnknownScenarioKind: return 1;
    case ErrorKind::EmptyEvaluation: return 2;
    default: return 3;
  }
}

void write_report(const RunReport& report, const fs::path& out_dir) {
  const nlohmann::json j = report_to_json(report);
  std::ofstream(out_dir / "report.json") << j.dump(2) << '\n';
  std::cerr << report.processed << " processed, " << report.failed.size() << " failed, " << report.wall_seconds
            << " s\n";
  for (const FrameFailure& f : report.failed) std::cerr << "  " << f.frame_id << ": " << f.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic ego-corridor ground truth from map, localization and object data"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "write seeded synthetic scenes");
  std::string kind = "all";
  std::size_t count = 20;
  std::uint64_t synth_seed = 0;
  std::string terrain = "flat";
  bool no_grid = false;
  std::string synth_out;
  synth->add_option("--kind", kind, "highway|sharp_curve|no_markings|parking_cars|others|all")->capture_default_str();
  synth->add_option("--count", count)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--terrain", terrain, "flat|ramp")->capture_default_str();
  synth->add_flag("--no-grid", no_grid, "omit the occupancy grid");
  synth->add_option("out_dir", synth_out)->required();

  // generate / oracle
  StageFlags gen_flags, oracle_flags;
  std::string gen_scenes, gen_out, oracle_scenes, oracle_out, save_map;
  int gen_workers = 1, oracle_workers = 1;
  bool gen_png = false, oracle_png = false;
  auto* gen = app.add_subcommand("generate", "label every scene of a directory");
  gen_flags.attach(gen);
  gen->add_option("--workers", gen_workers, "parallel frames")->capture_default_str();
  gen->add_flag("--png", gen_png, "also write PNG masks");
  gen->add_option("--save-height-map", save_map, "stitch all inline height samples into one map file");
  gen->add_option("scene_dir", gen_scenes)->required();
  gen->add_option("out_dir", gen_out)->required();
  auto* orc = app.add_subcommand("oracle", "brute-force reference masks for every scene");
  oracle_flags.attach(orc);
  orc->add_option("--workers", oracle_workers, "parallel frames")->capture_default_str();
  orc->add_flag("--png", oracle_png, "also write PNG masks");
  orc->add_option("scene_dir", oracle_scenes)->required();
  orc->add_option("out_dir", oracle_out)->required();

  // evaluate
  std::string dir_a, dir_b, manifest, csv_out;
  std::size_t batch_size = 25;
  std::optional<std::uint64_t> eval_seed;
  auto* eval = app.add_subcommand("evaluate", "Dice/Jaccard per scenario between two mask directories");
  eval->add_option("--batch-size", batch_size)->capture_default_str();
  eval->add_option("--manifest", manifest, "frame_id,scenario CSV");
  eval->add_option("--seed", eval_seed, "shuffle pairs before batching");
  eval->add_option("--out", csv_out, "CSV path (default stdout)");
  eval->add_option("mask_dir_a", dir_a)->required();
  eval->add_option("mask_dir_b", dir_b)->required();

  // overlay
  std::string image_path, mask_path, overlay_out;
  double alpha = 0.5;
  std::vector<int> tint{0, 255, 0};
  auto* ovl = app.add_subcommand("overlay", "tint corridor pixels of an image for review");
  ovl->add_option("--alpha", alpha)->capture_default_str();
  ovl->add_option("--tint", tint, "R G B")->expected(3);
  ovl->add_option("image", image_path)->required();
  ovl->add_option("mask", mask_path)->required();
  ovl->add_option("out_png", overlay_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      SynthOptions opt;
      opt.count = count;
      opt.seed = synth_seed;
      if (kind == "all") {
        opt.kinds.assign(std::begin(kAllScenarioKinds), std::end(kAllScenarioKinds));
      } else if (auto k = scenario_kind_from_string(kind)) {
        opt.kinds = {*k};
      } else {
        throw Error(ErrorKind::UnknownScenarioKind, "unknown scenario kind '" + kind + "'");
      }
      if (terrain == "flat") opt.terrain = TerrainKind::Flat;
      else if (terrain == "ramp") opt.terrain = TerrainKind::Ramp;
      else throw Error(ErrorKind::InvalidArgument, "terrain must be flat or ramp");
      opt.obstacles = !no_grid;
      write_synth(synthesize(opt), synth_out);
    } else if (gen->parsed()) {
      RunOptions ro{gen_workers, gen_png, {}};
      if (!save_map.empty()) ro.save_height_map = save_map;
      write_report(generate(fs::path(gen_scenes), gen_flags.resolve(), gen_out, ro), gen_out);
    } else if (orc->parsed()) {
      write_report(run_oracle(fs::path(oracle_scenes), oracle_flags.resolve(), oracle_out, {oracle_workers, oracle_png, {}}),
                   oracle_out);
    } else if (eval->parsed()) {
      EvaluationOptions eo{batch_size, {}, eval_seed};
      if (!manifest.empty()) eo.manifest = manifest;
      const EvaluationResult r = evaluate(dir_a, dir_b, eo);
      for (const std::string& id : r.skipped) std::cerr << "skipped " << id << ": missing in one directory\n";
      std::cerr << r.pairs << " pairs, " << r.skipped.size() << " skipped\n";
      std::ostringstream csv;
      write_scenario_csv(csv, r.rows);
      if (csv_out.empty()) std::cout << csv.str();
      else std::ofstream(csv_out, std::ios::binary) << csv.str();
    } else if (ovl->parsed()) {
      for (int c : tint)
        if (c < 0 || c > 255) throw Error(ErrorKind::InvalidArgument, "tint components must lie in [0, 255]");
      const Image out = overlay(read_image(image_path), read_mask(mask_path), alpha,
                                {static_cast<std::uint8_t>(tint[0]), static_cast<std::uint8_t>(tint[1]),
                                 static_cast<std::uint8_t>(tint[2])});
      write_png(out, overlay_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
