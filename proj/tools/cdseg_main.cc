/* Copyright 2026 The cdseg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// cdseg: scribble propagation with constrained dominant sets.
//
// Exit codes: 0 success, 1 input error, 2 convergence/diagnostic failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdseg/fixtures.h"
#include "cdseg/http_service.h"
#include "cdseg/io.h"
#include "cdseg/metrics.h"
#include "cdseg/propagation.h"
#include "cdseg/serve.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cdseg;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitFailure = 2;

struct Overrides {
  std::string config_path;
  std::vector<std::string> values;  // key=value
};

PipelineConfig resolve_config(const Overrides& o, PipelineConfig base) {
  PipelineConfig cfg =
      o.config_path.empty() ? std::move(base) : load_config(o.config_path, std::move(base));
  for (const std::string& kv : o.values) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::string map_name(const MapSpec& spec) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s_k%g_s%g", to_string(spec.space).c_str(),
                spec.k, spec.sigma_fh);
  return buf;
}

void write_diagnostics(const fs::path& dir, const PipelineResult& result,
                       const PreparedImage& prepared) {
  fs::create_directories(dir);
  nlohmann::json summary;
  summary["sigma_fh"] = result.sigma_fh;
  summary["warnings"] = result.warnings;
  summary["maps"] = nlohmann::json::array();
  for (const MapOutcome& m : result.maps) {
    const std::string name = map_name(m.spec);
    save_mask(m.mask, dir / ("mask_" + name + ".png"));
    const PreparedMap* pm = nullptr;
    for (const PreparedMap& p : prepared.maps) {
      if (p.spec.space == m.spec.space && p.spec.k == m.spec.k &&
          p.spec.sigma_fh == m.spec.sigma_fh) {
        pm = &p;
      }
    }
    for (const ClassSegments& seg : m.segments) {
      const double peak =
          *std::max_element(seg.confidence.begin(), seg.confidence.end());
      Image8 raster(m.mask.width(), m.mask.height(), 1);
      if (pm && peak > 0.0) {
        for (int p = 0; p < raster.pixel_count(); ++p) {
          raster.at_index(p) = static_cast<std::uint8_t>(std::lround(
              255.0 * seg.confidence[pm->superpixels.label_at(p)] / peak));
        }
      }
      save_png(raster, dir / ("confidence_" + name + "_class" +
                              std::to_string(seg.class_id) + ".png"));
    }
    summary["maps"].push_back({{"name", name},
                               {"superpixels", pm ? pm->superpixels.count() : 0},
                               {"sigma_c", m.sigma.sigma_c},
                               {"sigma_t", m.sigma.sigma_t},
                               {"scribble_consistency", m.sigma.score},
                               {"flood_filled", m.assignment.flood_filled},
                               {"unreachable", m.assignment.unreachable}});
  }
  save_png(confidence_raster(result.mask.width(), result.mask.height(),
                             result.agreement),
           dir / "agreement.png");
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
}

// Distinct pseudo-random colors per superpixel id.
Image8 colorize(const SuperpixelMap& sp) {
  Image8 out(sp.width(), sp.height(), 3);
  for (int p = 0; p < sp.width() * sp.height(); ++p) {
    std::uint32_t h = static_cast<std::uint32_t>(sp.label_at(p)) * 2654435761u;
    for (int c = 0; c < 3; ++c) {
      out.at_index(p, c) = static_cast<std::uint8_t>(64 + (h >> (8 * c)) % 192);
    }
  }
  return out;
}

std::vector<fs::path> sorted_pngs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scribble-to-mask propagation with constrained dominant sets"};
  app.require_subcommand(1);

  // superpixels
  auto* sp_cmd = app.add_subcommand("superpixels", "Segment an image into superpixels");
  std::string sp_image, sp_out, sp_space = "Intensity";
  FhParams sp_params;
  sp_cmd->add_option("--image", sp_image, "Input PNG/PPM")->required();
  sp_cmd->add_option("--space", sp_space, "Color space");
  sp_cmd->add_option("--k", sp_params.k, "FH threshold scale");
  sp_cmd->add_option("--sigma-fh", sp_params.sigma_fh, "Pre-smoothing sigma");
  sp_cmd->add_option("--min-size", sp_params.min_size, "Minimum component size");
  sp_cmd->add_option("--out", sp_out, "Colorized superpixel PNG");

  // propagate
  auto* prop_cmd = app.add_subcommand("propagate", "Propagate scribbles to a full mask");
  std::string prop_image, prop_scribbles, prop_out, prop_diag;
  Overrides prop_overrides;
  prop_cmd->add_option("--image", prop_image, "Input PNG/PPM")->required();
  prop_cmd->add_option("--scribbles", prop_scribbles, "Scribble PNG or stroke JSON")->required();
  prop_cmd->add_option("--config", prop_overrides.config_path, "Key-value config file");
  prop_cmd->add_option("--set", prop_overrides.values, "Override a config key (key=value)");
  prop_cmd->add_option("--out", prop_out, "Output mask PNG")->required();
  prop_cmd->add_option("--diag", prop_diag, "Directory for intermediate outputs");

  // vote
  auto* vote_cmd = app.add_subcommand("vote", "Majority vote over label masks");
  std::vector<std::string> vote_inputs;
  std::string vote_out;
  vote_cmd->add_option("masks", vote_inputs, "Mask PNGs")->required();
  vote_cmd->add_option("--out", vote_out, "Output mask PNG")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate predicted masks against ground truth");
  std::string eval_pred, eval_gt;
  int eval_classes = 21, eval_ignore = 255;
  eval_cmd->add_option("--pred", eval_pred, "Directory of predicted mask PNGs")->required();
  eval_cmd->add_option("--gt", eval_gt, "Directory of ground-truth mask PNGs")->required();
  eval_cmd->add_option("--classes", eval_classes, "Number of classes");
  eval_cmd->add_option("--ignore", eval_ignore, "Ignored ground-truth label");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the interactive session service");
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  Overrides serve_overrides;
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--port", serve_port, "Port");
  serve_cmd->add_option("--config", serve_overrides.config_path, "Key-value config file");
  serve_cmd->add_option("--set", serve_overrides.values, "Override a config key (key=value)");

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "Write the synthetic three-region fixture");
  std::string demo_dir = "demo";
  unsigned demo_seed = 7;
  demo_cmd->add_option("--out-dir", demo_dir, "Output directory");
  demo_cmd->add_option("--seed", demo_seed, "Noise seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sp_cmd) {
      const Image8 image = load_image(sp_image);
      const ColorSpace space = parse_color_space(sp_space);
      const SuperpixelMap sp =
          segment_superpixels(convert_color_space(image, space), sp_params);
      std::cout << "superpixels " << sp.count() << "\n";
      if (!sp_out.empty()) save_png(colorize(sp), sp_out);
    } else if (*prop_cmd) {
      const PipelineConfig cfg = resolve_config(prop_overrides, PipelineConfig{});
      const Image8 image = load_image(prop_image);
      const ScribbleSet scr = load_scribbles(prop_scribbles, cfg.n_cl);
      const PreparedImage prepared = prepare_image(image, cfg);
      const PipelineResult result = run_scribbles(prepared, scr, cfg);
      for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
      save_mask(result.mask, prop_out);
      if (!prop_diag.empty()) write_diagnostics(prop_diag, result, prepared);
      int unconverged = 0;
      for (const MapOutcome& m : result.maps) {
        for (const ClassSegments& s : m.segments) {
          unconverged += s.unconverged + static_cast<int>(s.uncovered_seeds.size());
        }
      }
      if (unconverged > 0) {
        std::cerr << "warning: " << unconverged
                  << " unconverged solves or uncovered seeds\n";
        return kExitFailure;
      }
    } else if (*vote_cmd) {
      std::vector<LabelMask> masks;
      for (const auto& path : vote_inputs) masks.push_back(load_mask(path));
      save_mask(majority_vote(masks), vote_out);
    } else if (*eval_cmd) {
      ConfusionMatrix total(eval_classes);
      int images = 0;
      for (const fs::path& gt_path : sorted_pngs(eval_gt)) {
        const fs::path pred_path = fs::path(eval_pred) / gt_path.filename();
        if (!fs::exists(pred_path)) {
          throw IoError("missing prediction for " + gt_path.filename().string());
        }
        total += accumulate(load_mask(pred_path), load_mask(gt_path), eval_classes,
                            eval_ignore);
        ++images;
      }
      if (images == 0) throw IoError("no ground-truth PNGs in " + eval_gt);
      std::cout << "images " << images << "\n" << format_report(total);
    } else if (*serve_cmd) {
      SessionStore store(resolve_config(serve_overrides, PipelineConfig::interactive()));
      HttpService service(store);
      std::cerr << "listening on " << serve_host << ":" << serve_port << "\n";
      if (!service.listen(serve_host, serve_port)) {
        std::cerr << "error: cannot bind " << serve_host << ":" << serve_port << "\n";
        return kExitInput;
      }
    } else if (*demo_cmd) {
      const SyntheticFixture fx = make_three_region_fixture(demo_seed);
      const fs::path dir = demo_dir;
      fs::create_directories(dir);
      save_png(fx.image, dir / "image.png");
      write_file(dir / "image.ppm", encode_ppm(fx.image));
      save_mask(fx.ground_truth, dir / "gt.png");
      save_png(scribbles_to_png_raster(fx.scribbles), dir / "scribbles.png");
      std::ofstream(dir / "strokes.json") << format_strokes(fx.strokes) << "\n";
      std::ofstream(dir / "default.cfg") << format_config(PipelineConfig{});
      std::cout << "wrote fixture to " << dir.string() << "\n";
    }
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const EmptySeedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
