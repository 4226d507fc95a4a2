// Copyright 2026 The LPVC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "lpvc/dataset.hpp"
#include "lpvc/error.hpp"
#include "lpvc/media_io.hpp"
#include "lpvc/metrics.hpp"
#include "lpvc/pipeline.hpp"
#include "lpvc/trainer.hpp"
#include "lpvc/weights_io.hpp"

#ifndef LPVC_VERSION
#define LPVC_VERSION "0.0.0"
#endif

namespace lpvc::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

/// Flag combinations that are syntactically valid but meaningless.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputOptions {
  std::string path;
  int width = 0;
  int height = 0;
  int fps = 30;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--in", in.path, "Input video (.y4m, or raw luma with --width/--height)")->required();
  cmd->add_option("--width", in.width, "Raw input width");
  cmd->add_option("--height", in.height, "Raw input height");
  cmd->add_option("--fps", in.fps, "Raw input frame rate")->check(CLI::PositiveNumber);
}

VideoSeq load_input(const InputOptions& in) {
  const auto format = format_from_path(in.path);
  if (format == VideoFormat::kRaw) {
    if (in.width <= 0 || in.height <= 0) throw UsageError("raw input needs --width and --height");
    return read_video(in.path, format, RawGeometry{in.width, in.height, std::nullopt, FrameRate{in.fps, 1}});
  }
  return read_video(in.path, format);
}

struct PredictorOptions {
  std::string predictor = "fd";
  std::string weights;
  std::optional<int> range;
  std::optional<int> k;
  std::string cost = "sad";
};

void add_predictor_options(CLI::App* cmd, PredictorOptions& p) {
  cmd->add_option("--predictor", p.predictor, "Frame predictor")
      ->required()
      ->check(CLI::IsMember({"fd", "bmc", "lfp"}));
  cmd->add_option("--weights", p.weights, "Generator weight file (lfp)");
  cmd->add_option("--range", p.range, "BMC search range in pixels (default 16)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--k", p.k, "Intra lead-in / context frames")->check(CLI::PositiveNumber);
  cmd->add_option("--cost", p.cost, "BMC matching cost")->check(CLI::IsMember({"sad", "sse"}));
}

struct ResolvedPredictor {
  PredictorKind kind;
  MotionSearchConfig motion;
  int k = 1;
  std::optional<Generator> net;
};

ResolvedPredictor resolve(const PredictorOptions& p) {
  ResolvedPredictor r;
  r.kind = parse_predictor(p.predictor);
  if (r.kind != PredictorKind::kBmc && p.range) throw UsageError("--range only applies to --predictor bmc");
  if (r.kind != PredictorKind::kBmc && p.cost != "sad") throw UsageError("--cost only applies to --predictor bmc");
  if (r.kind != PredictorKind::kLfp && !p.weights.empty()) throw UsageError("--weights only applies to --predictor lfp");
  if (r.kind == PredictorKind::kLfp && p.weights.empty()) throw UsageError("--predictor lfp requires --weights");
  r.motion.search_range = p.range.value_or(16);
  r.motion.cost = p.cost == "sse" ? MatchCost::kSse : MatchCost::kSad;
  if (r.kind == PredictorKind::kLfp) {
    r.net = load_generator(p.weights, p.k);
    r.k = r.net->config().k;
  } else {
    r.k = p.k.value_or(1);
  }
  return r;
}

json predictor_json(const ResolvedPredictor& r, const PredictorOptions& p) {
  json j{{"predictor", to_string(r.kind)}, {"k", r.k}};
  if (r.kind == PredictorKind::kBmc) {
    j["search_range"] = r.motion.search_range;
    j["cost"] = p.cost;
  }
  if (r.net) {
    const auto& c = r.net->config();
    j["weights"] = p.weights;
    j["net"] = {{"k", c.k}, {"blocks", c.blocks}, {"channels", c.channels}, {"kernel", c.kernel},
                {"res_scale", c.res_scale}};
  }
  return j;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_manifest(const fs::path& artifact, const std::string& command, const std::vector<std::string>& args,
                    json config, std::optional<std::uint64_t> seed) {
  json m;
  m["tool"] = "lpvc";
  m["version"] = LPVC_VERSION;
  m["command"] = command;
  m["argv"] = args;
  m["config"] = std::move(config);
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["timestamp"] = timestamp();
  std::ofstream out(artifact.string() + ".manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest for " + artifact.string());
  out << m.dump(2) << '\n';
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predictive video coding with frame-difference, block-motion and learned frame prediction", "lpvc"};
  app.set_version_flag("--version", LPVC_VERSION);
  app.require_subcommand(1);

  // encode
  InputOptions enc_in;
  PredictorOptions enc_pred;
  std::string enc_out, enc_stats;
  int enc_qp = 30;
  auto* encode = app.add_subcommand("encode", "Encode a video into an .lpvc bitstream");
  add_input_options(encode, enc_in);
  add_predictor_options(encode, enc_pred);
  encode->add_option("--out", enc_out, "Output bitstream")->required();
  encode->add_option("--qp", enc_qp, "Quantisation parameter")->check(CLI::Range(kMinQp, kMaxQp));
  encode->add_option("--stats", enc_stats, "Per-frame statistics CSV");

  // decode
  std::string dec_in, dec_out, dec_weights;
  auto* decode = app.add_subcommand("decode", "Decode an .lpvc bitstream");
  decode->add_option("--in", dec_in, "Input bitstream")->required();
  decode->add_option("--out", dec_out, "Output video (.y4m or raw)")->required();
  decode->add_option("--weights", dec_weights, "Generator weight file for lfp streams");

  // predict
  InputOptions pred_in;
  PredictorOptions pred_pred;
  std::string pred_out;
  int pred_crop = 0;
  auto* predict = app.add_subcommand("predict", "Per-frame prediction PSNR from uncompressed context");
  add_input_options(predict, pred_in);
  add_predictor_options(predict, pred_pred);
  predict->add_option("--out", pred_out, "Output CSV (frame,psnr_db)")->required();
  predict->add_option("--crop", pred_crop, "Border excluded from PSNR")->check(CLI::NonNegativeNumber);

  // rd-sweep
  InputOptions rd_in;
  PredictorOptions rd_pred;
  std::string rd_out;
  int qp_min = 25, qp_max = 35;
  auto* sweep = app.add_subcommand("rd-sweep", "Encode at every QP in a range and write an RD curve");
  add_input_options(sweep, rd_in);
  add_predictor_options(sweep, rd_pred);
  sweep->add_option("--qp-min", qp_min, "First QP")->check(CLI::Range(kMinQp, kMaxQp));
  sweep->add_option("--qp-max", qp_max, "Last QP")->check(CLI::Range(kMinQp, kMaxQp));
  sweep->add_option("--out", rd_out, "Output CSV (bitrate_kbps,psnr_db)")->required();

  // bd
  std::string bd_test, bd_anchor;
  auto* bd = app.add_subcommand("bd", "Bjontegaard delta PSNR of a test curve against an anchor");
  bd->add_option("--test", bd_test, "Test RD curve CSV")->required()->check(CLI::ExistingFile);
  bd->add_option("--anchor", bd_anchor, "Anchor RD curve CSV")->required()->check(CLI::ExistingFile);

  // extract
  std::string ex_dir, ex_out;
  std::size_t ex_count = 0;
  std::uint64_t ex_seed = 1;
  ExtractConfig ex_cfg;
  std::vector<std::string> ex_weights;
  auto* extract = app.add_subcommand("extract", "Sample 9x48x48 training patch sequences from .y4m videos");
  extract->add_option("--videos", ex_dir, "Directory of .y4m videos")->required()->check(CLI::ExistingDirectory);
  extract->add_option("--count", ex_count, "Number of patch sequences")->required()->check(CLI::PositiveNumber);
  extract->add_option("--seed", ex_seed, "Random seed");
  extract->add_option("--out", ex_out, "Output dataset (.lfpd)")->required();
  extract->add_option("--threshold", ex_cfg.motion_threshold, "Mean-square motion threshold");
  extract->add_option("--accept-prob", ex_cfg.low_motion_accept_prob, "Acceptance probability for low motion")
      ->check(CLI::Range(0.0, 1.0));
  extract->add_option("--weight", ex_weights, "Sampling weight as <file-stem>=<w>; unlisted videos get 1");

  // train
  std::string tr_data, tr_out, tr_loss = "l2", tr_init, tr_disc_in, tr_disc_out, tr_trace;
  NetConfig tr_net;
  TrainConfig tr_cfg;
  std::optional<double> tr_lr, tr_lr_d;
  std::optional<int> tr_batch, tr_batch_d;
  auto* train = app.add_subcommand("train", "Train the frame-prediction network");
  train->add_option("--data", tr_data, "Dataset (.lfpd)")->required()->check(CLI::ExistingFile);
  train->add_option("--loss", tr_loss, "Training loss")->required()->check(CLI::IsMember({"l1", "l2", "gan"}));
  train->add_option("--out", tr_out, "Output generator weights (.lfpw)")->required();
  train->add_option("--k", tr_net.k, "Input frames K")->check(CLI::Range(1, 8));
  train->add_option("--blocks", tr_net.blocks, "Residual blocks B")->check(CLI::PositiveNumber);
  train->add_option("--channels", tr_net.channels, "Channel width C")->check(CLI::PositiveNumber);
  train->add_option("--res-scale", tr_net.res_scale, "Residual scaling");
  train->add_option("--iters", tr_cfg.iterations, "Iterations")->check(CLI::NonNegativeNumber);
  train->add_option("--batch", tr_batch, "Generator minibatch (default 32, gan 16)")->check(CLI::PositiveNumber);
  train->add_option("--batch-d", tr_batch_d, "Discriminator minibatch (default 32)")->check(CLI::Range(2, 1 << 20));
  train->add_option("--lr", tr_lr, "Generator learning rate (default 1e-4, gan 1e-6)");
  train->add_option("--lr-d", tr_lr_d, "Discriminator learning rate (default 1e-5)");
  train->add_option("--lambda-ms", tr_cfg.lambda.mse, "Weight of the MSE term (gan)");
  train->add_option("--lambda-adv", tr_cfg.lambda.adv, "Weight of the adversarial term (gan)");
  train->add_option("--seed", tr_cfg.seed, "Random seed (initialisation and minibatches)");
  train->add_option("--init", tr_init, "Starting generator weights (required for gan)");
  train->add_option("--disc-in", tr_disc_in, "Starting discriminator weights (gan)");
  train->add_option("--disc-out", tr_disc_out, "Output discriminator weights (gan)");
  train->add_option("--trace", tr_trace, "Loss trace CSV (iter,loss)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << LPVC_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink;
    const int code = app.exit(e, sink, sink);
    err << sink.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*encode) {
      const auto seq = load_input(enc_in);
      const auto pred = resolve(enc_pred);
      CodecConfig cfg{pred.kind, pred.k, enc_qp, pred.motion};
      const auto result = encode_video(seq, cfg, pred.net ? &*pred.net : nullptr);
      write_bytes(enc_out, result.bitstream);
      if (!enc_stats.empty()) {
        std::ofstream s(enc_stats, std::ios::trunc);
        if (!s) throw IoError("cannot open " + enc_stats);
        s << "frame,intra,mv_bits,residual_bits,prediction_psnr_db,reconstruction_psnr_db\n"
          << std::setprecision(17);
        for (const auto& f : result.frames) {
          s << f.index << ',' << int(f.intra) << ',' << f.mv_bits << ',' << f.residual_bits << ',';
          if (f.prediction_psnr) s << *f.prediction_psnr;
          s << ',' << f.reconstruction_psnr << '\n';
        }
      }
      auto config = predictor_json(pred, enc_pred);
      config["qp"] = enc_qp;
      config["input"] = enc_in.path;
      write_manifest(enc_out, "encode", args, config, std::nullopt);
      out << "frames " << result.frames.size() << " bits " << result.payload_bits() << " kbps "
          << fixed(result.kbps(), 3) << " mean_psnr_db " << fixed(result.mean_psnr(), 4) << '\n';
      return kExitOk;
    }

    if (*decode) {
      const auto bytes = read_bytes(dec_in);
      const auto header = BitstreamHeader::parse(bytes);
      std::optional<Generator> net;
      if (header.predictor == PredictorKind::kLfp) {
        if (dec_weights.empty()) throw ConfigMismatch("this stream uses lfp prediction; pass --weights");
        net = load_generator(dec_weights, header.k);
      } else if (!dec_weights.empty()) {
        throw UsageError("--weights given but the stream does not use lfp prediction");
      }
      const auto seq = decode_video(bytes, net ? &*net : nullptr);
      write_video(seq, dec_out, format_from_path(dec_out));
      json config{{"input", dec_in}, {"predictor", to_string(header.predictor)}, {"k", header.k}, {"qp", header.qp}};
      if (net) config["weights"] = dec_weights;
      write_manifest(dec_out, "decode", args, config, std::nullopt);
      out << "frames " << seq.size() << " " << seq.width() << "x" << seq.height() << '\n';
      return kExitOk;
    }

    if (*predict) {
      const auto seq = load_input(pred_in);
      const auto pred = resolve(pred_pred);
      PredictOptions opts{pred_crop, pred.motion};
      const auto scores = predict_only(seq, pred.kind, opts, pred.net ? &*pred.net : nullptr);
      std::ofstream s(pred_out, std::ios::trunc);
      if (!s) throw IoError("cannot open " + pred_out + " for writing");
      s << "frame,psnr_db\n" << std::setprecision(17);
      double sum = 0.0;
      for (const auto& sc : scores) {
        s << sc.index << ',' << sc.psnr << '\n';
        sum += sc.psnr;
      }
      auto config = predictor_json(pred, pred_pred);
      config["crop"] = pred_crop;
      config["input"] = pred_in.path;
      write_manifest(pred_out, "predict", args, config, std::nullopt);
      out << "predicted " << scores.size() << " frames, mean_psnr_db " << fixed(sum / double(scores.size()), 4) << '\n';
      return kExitOk;
    }

    if (*sweep) {
      if (qp_min > qp_max) throw UsageError("--qp-min must not exceed --qp-max");
      const auto seq = load_input(rd_in);
      const auto pred = resolve(rd_pred);
      std::vector<RdPoint> points;
      for (int qp = qp_min; qp <= qp_max; ++qp) {
        CodecConfig cfg{pred.kind, pred.k, qp, pred.motion};
        const auto result = encode_video(seq, cfg, pred.net ? &*pred.net : nullptr);
        points.push_back({result.kbps(), result.mean_psnr()});
        out << "qp " << qp << " kbps " << fixed(points.back().bitrate_kbps, 3) << " psnr_db "
            << fixed(points.back().psnr_db, 4) << '\n';
      }
      write_rd_csv(points, rd_out);
      auto config = predictor_json(pred, rd_pred);
      config["qp_min"] = qp_min;
      config["qp_max"] = qp_max;
      config["input"] = rd_in.path;
      write_manifest(rd_out, "rd-sweep", args, config, std::nullopt);
      return kExitOk;
    }

    if (*bd) {
      const RdCurve test(read_rd_csv(bd_test));
      const RdCurve anchor(read_rd_csv(bd_anchor));
      out << fixed(bd_psnr(test, anchor), 3) << '\n';
      return kExitOk;
    }

    if (*extract) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(ex_dir))
        if (entry.is_regular_file() && format_from_path(entry.path()) == VideoFormat::kY4m)
          files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) throw DataError("no .y4m videos in " + ex_dir);
      std::map<std::string, double> weight_of;
      for (const auto& w : ex_weights) {
        const auto eq = w.find('=');
        if (eq == std::string::npos) throw UsageError("--weight expects <file-stem>=<w>, got " + w);
        try {
          weight_of[w.substr(0, eq)] = std::stod(w.substr(eq + 1));
        } catch (const std::logic_error&) {
          throw UsageError("--weight value is not a number: " + w);
        }
      }
      std::vector<VideoSeq> videos;
      json sources = json::array();
      for (const auto& f : files) {
        videos.push_back(read_video(f, VideoFormat::kY4m));
        const auto it = weight_of.find(f.stem().string());
        ex_cfg.video_weights.push_back(it == weight_of.end() ? 1.0 : it->second);
        sources.push_back({{"file", f.filename().string()}, {"weight", ex_cfg.video_weights.back()}});
        if (it != weight_of.end()) weight_of.erase(it);
      }
      if (!weight_of.empty()) throw UsageError("--weight names an unknown video: " + weight_of.begin()->first);
      ex_cfg.seed = ex_seed;
      const auto result = extract_patches(videos, ex_cfg, ex_count);
      write_dataset(result.patches, ex_out);
      json config{{"videos", ex_dir},
                  {"count", ex_count},
                  {"patch_size", ex_cfg.patch_size},
                  {"seq_len", ex_cfg.seq_len},
                  {"motion_threshold", ex_cfg.motion_threshold},
                  {"low_motion_accept_prob", ex_cfg.low_motion_accept_prob},
                  {"sources", sources},
                  {"trials", result.stats.trials}};
      write_manifest(ex_out, "extract", args, config, ex_seed);
      out << "accepted " << result.stats.accepted << " of " << result.stats.trials << " candidates\n";
      return kExitOk;
    }

    if (*train) {
      const auto loss = parse_loss(tr_loss);
      if (loss == LossKind::kGan) {
        const auto gan = TrainConfig::gan_defaults();
        tr_cfg.loss = LossKind::kGan;
        tr_cfg.lr_generator = tr_lr.value_or(gan.lr_generator);
        tr_cfg.lr_discriminator = tr_lr_d.value_or(gan.lr_discriminator);
        tr_cfg.batch_generator = tr_batch.value_or(gan.batch_generator);
        tr_cfg.batch_discriminator = tr_batch_d.value_or(gan.batch_discriminator);
        if (tr_init.empty()) throw UsageError("--loss gan starts from a pretrained generator; pass --init");
      } else {
        if (tr_lr_d || tr_batch_d || !tr_disc_in.empty() || !tr_disc_out.empty())
          throw UsageError("discriminator options only apply to --loss gan");
        tr_cfg.loss = loss;
        tr_cfg.lr_generator = tr_lr.value_or(1e-4);
        tr_cfg.batch_generator = tr_batch.value_or(32);
      }
      const auto dataset = read_dataset(tr_data);
      Generator gen = tr_init.empty() ? Generator(tr_net, Init::kUniformFanIn, tr_cfg.seed) : load_generator(tr_init);
      json config{{"data", tr_data},
                  {"loss", tr_loss},
                  {"iterations", tr_cfg.iterations},
                  {"lr_generator", tr_cfg.lr_generator},
                  {"batch_generator", tr_cfg.batch_generator},
                  {"net",
                   {{"k", gen.config().k},
                    {"blocks", gen.config().blocks},
                    {"channels", gen.config().channels},
                    {"kernel", gen.config().kernel},
                    {"res_scale", gen.config().res_scale}}}};
      std::vector<double> trace;
      if (loss == LossKind::kGan) {
        Discriminator disc = tr_disc_in.empty() ? Discriminator(DiscConfig{}, Init::kUniformFanIn, tr_cfg.seed + 1)
                                                : load_discriminator(tr_disc_in);
        auto result = train_gan(dataset, std::move(gen), std::move(disc), tr_cfg);
        save_generator(result.generator, tr_out);
        if (!tr_disc_out.empty()) save_discriminator(result.discriminator, tr_disc_out);
        trace = std::move(result.generator_trace);
        config["lr_discriminator"] = tr_cfg.lr_discriminator;
        config["batch_discriminator"] = tr_cfg.batch_discriminator;
        config["lambda_ms"] = tr_cfg.lambda.mse;
        config["lambda_adv"] = tr_cfg.lambda.adv;
        config["disc_final_loss"] = result.discriminator_trace.empty() ? 0.0 : result.discriminator_trace.back();
      } else {
        auto result = train_lp(dataset, std::move(gen), tr_cfg);
        save_generator(result.generator, tr_out);
        trace = std::move(result.loss_trace);
      }
      if (!tr_trace.empty()) write_loss_trace(trace, tr_trace);
      write_manifest(tr_out, "train", args, config, tr_cfg.seed);
      out << "trained " << trace.size() << " iterations";
      if (!trace.empty()) out << ", loss " << trace.front() << " -> " << trace.back();
      out << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lpvc::cli
