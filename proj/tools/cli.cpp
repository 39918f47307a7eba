#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "eegc/codec.hpp"
#include "eegc/codec_dipole.hpp"
#include "eegc/container.hpp"
#include "eegc/detection.hpp"
#include "eegc/error.hpp"
#include "eegc/ingest.hpp"
#include "eegc/metrics.hpp"

namespace eegc::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// key=value lines; '#' starts a comment. Values only fill options that were
// not given on the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr) throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::istringstream values(value);
    for (std::string v; std::getline(values, v, ',');) {
      if (!trim(v).empty()) opt->add_result(trim(v));
    }
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

struct CodecOptions {
  std::string codec = "spiht2d";
  double bps = 2.0;
  std::vector<double> rates{2.0, 4.0};
  CodecConfig config;
  std::size_t window = 0;  // 0 keeps the codec default
  double detector_k = DetectorParams{}.k;
  std::string config_file;
};

void add_codec_options(CLI::App* app, CodecOptions& o, bool many_rates) {
  app->add_option("--codec", o.codec, "spiht2d | dictionary | dipole")->capture_default_str();
  if (many_rates) {
    app->add_option("--bps", o.rates, "target bit rates (bits per sample)")->capture_default_str();
  } else {
    app->add_option("--bps", o.bps, "target bit rate (bits per sample)")->capture_default_str();
  }
  app->add_option("--epoch", o.config.epoch, "dictionary segment length in samples")->capture_default_str();
  app->add_option("--tau", o.config.tau, "dictionary match threshold")->capture_default_str();
  app->add_option("--capacity", o.config.capacity, "dictionary capacity per channel")->capture_default_str();
  app->add_option("--window", o.window, "window length in samples (2D SPIHT or dipole)");
  app->add_option("--smooth-thresh", o.config.smooth_threshold, "dipole residual smoothness threshold")
      ->capture_default_str();
  app->add_option("--detector-k", o.detector_k, "detector onset factor")->capture_default_str();
  app->add_option("--config", o.config_file, "key=value settings file (flags take precedence)");
}

CodecConfig codec_config(const CodecOptions& o, CodecId id, const Recording& rec) {
  CodecConfig c = o.config;
  if (o.window > 0) {
    if (id == CodecId::Dipole) c.dipole_window = o.window;
    else c.window_samples = o.window;
  }
  c.channel_labels = rec.channels;
  c.validate();
  return c;
}

DetectorParams detector(double k) {
  if (!(k > 0.0)) throw ConfigError("detector factor must be positive");
  DetectorParams p;
  p.k = k;
  return p;
}

void write_recording(const fs::path& path, const Recording& rec) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".edf") write_edf(path, rec);
  else write_raw(path, rec);
}

Recording recording_from(const CompressedRecord& c, SignalMatrix samples) {
  Recording rec;
  rec.fs = c.fs;
  rec.samples = std::move(samples);
  if (c.codec == CodecId::Dipole) rec.channels = parse_dipole_side_info(c).labels;
  if (rec.channels.size() != c.n_channels) {
    rec.channels.clear();
    for (std::uint32_t i = 0; i < c.n_channels; ++i) rec.channels.push_back("ch" + std::to_string(i));
  }
  return rec;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void write_gnuplot(const std::string& path, const std::string& data) {
  auto out = open_out(path);
  out << "set datafile separator ','\n"
      << "set xlabel 'PRD (%)'\n"
      << "set ylabel 'TP (%)'\n"
      << "set key off\n"
      << "plot '" << data << "' using 1:2 every ::1 with points pt 7\n";
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config: return kUsage;
    case ErrorKind::Format:
    case ErrorKind::Structure:
    case ErrorKind::Io: return kFormat;
    case ErrorKind::Metric: return kMetric;
    default: return kCodec;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"EEG lossy compression toolkit"};
  app.require_subcommand(1);

  // compress
  CodecOptions comp;
  std::string comp_in, comp_out, comp_report;
  auto* compress = app.add_subcommand("compress", "compress an EDF or raw recording");
  compress->add_option("input", comp_in)->required();
  compress->add_option("output", comp_out)->required();
  compress->add_option("--report", comp_report, "write achieved rate as CSV");
  add_codec_options(compress, comp, false);

  // decompress
  std::string dec_in, dec_out;
  auto* decompress_cmd = app.add_subcommand("decompress", "decode a container to a raw (or .edf) recording");
  decompress_cmd->add_option("input", dec_in)->required();
  decompress_cmd->add_option("output", dec_out)->required();

  // evaluate
  std::string ev_orig, ev_recon, ev_container, ev_truth, ev_report, ev_plot, ev_gnuplot, ev_config;
  bool ev_detect = false;
  double ev_k = DetectorParams{}.k;
  auto* evaluate = app.add_subcommand("evaluate", "distortion, rate and detection agreement");
  evaluate->add_option("original", ev_orig)->required();
  evaluate->add_option("reconstructed", ev_recon)->required();
  evaluate->add_option("--container", ev_container, "container, for achieved rate and CR");
  evaluate->add_flag("--detect", ev_detect, "run the detector on both recordings");
  evaluate->add_option("--truth", ev_truth, "flag file used as ground truth instead of detecting on the original");
  evaluate->add_option("--detector-k", ev_k, "detector onset factor")->capture_default_str();
  evaluate->add_option("--report", ev_report, "CSV report path");
  evaluate->add_option("--plot", ev_plot, "CSV of (prd, tp_percent)");
  evaluate->add_option("--gnuplot", ev_gnuplot, "gnuplot script for the plot data");
  evaluate->add_option("--config", ev_config, "key=value settings file");

  // batch
  CodecOptions batch_opts;
  std::string manifest, out_dir = ".";
  auto* batch = app.add_subcommand("batch", "compress, decode and score every recording of a manifest");
  batch->add_option("--manifest", manifest, "lines of: patient path [truth-flags]")->required();
  batch->add_option("--out-dir", out_dir)->capture_default_str();
  add_codec_options(batch, batch_opts, true);

  // detect
  std::string det_in, det_out, det_config;
  double det_k = DetectorParams{}.k;
  auto* detect_cmd = app.add_subcommand("detect", "run the proxy seizure detector");
  detect_cmd->add_option("input", det_in)->required();
  detect_cmd->add_option("--out", det_out, "flag file to write");
  detect_cmd->add_option("--detector-k", det_k)->capture_default_str();
  detect_cmd->add_option("--config", det_config, "key=value settings file");

  // aggregate
  std::vector<std::string> agg_in;
  std::string agg_report;
  auto* aggregate_cmd = app.add_subcommand("aggregate", "average per-patient detection rows");
  aggregate_cmd->add_option("reports", agg_in, "CSV files with patient,detections,tp_percent,fp_count")->required();
  aggregate_cmd->add_option("--report", agg_report);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (compress->parsed()) {
      if (!comp.config_file.empty()) apply_config_file(*compress, comp.config_file);
      const CodecId id = codec_from_name(comp.codec);
      check_target_bps(comp.bps);
      const Recording rec = read_recording(comp_in);
      const auto codec = make_codec(id, codec_config(comp, id, rec));
      const CompressedRecord c = codec->compress(rec.samples, rec.fs, comp.bps);
      write_container(comp_out, c);
      const double achieved = achieved_bps(c);
      out << "codec=" << codec_name(id) << " target_bps=" << fmt(comp.bps) << " payload_bps="
          << fmt(static_cast<double>(c.payload.size()) / static_cast<double>(c.total_samples()))
          << " achieved_bps=" << fmt(achieved) << " cr=" << fmt(16.0 / achieved) << '\n';
      if (!comp_report.empty()) {
        auto r = open_out(comp_report);
        r << "codec,target_bps,achieved_bps,cr\n"
          << codec_name(id) << ',' << fmt(comp.bps) << ',' << fmt(achieved) << ',' << fmt(16.0 / achieved) << '\n';
      }
    } else if (decompress_cmd->parsed()) {
      const CompressedRecord c = read_container(dec_in);
      if (c.truncated) err << "warning: payload is truncated; decoding the bits that are present\n";
      write_recording(dec_out, recording_from(c, eegc::decompress(c)));
    } else if (evaluate->parsed()) {
      if (!ev_config.empty()) apply_config_file(*evaluate, ev_config);
      const Recording orig = read_recording(ev_orig);
      const Recording recon = read_recording(ev_recon);
      if (orig.fs != recon.fs) throw StructureError("recordings have different sampling rates");
      const double p = prd(orig.samples, recon.samples);
      const double p_mr = prd(orig.samples, recon.samples, PrdVariant::MeanRemoved);
      std::string rate_cols = ",";
      if (!ev_container.empty()) {
        const CompressedRecord c = read_container(ev_container);
        const auto point = rd_point(orig.samples, c, recon.samples);
        rate_cols = fmt(point.achieved_bps) + ',' + fmt(point.cr);
      }
      std::string det_cols = ",,";
      std::optional<DetectionReport> report;
      if (ev_detect || !ev_truth.empty()) {
        const DetectorParams params = detector(ev_k);
        const auto truth = ev_truth.empty() ? detect(orig, params) : read_flags(ev_truth);
        report = match_flags(truth, detect(recon, params));
        det_cols = std::to_string(report->ground_truth_count) + ',' +
                   (report->tp_percent ? fmt(*report->tp_percent, "%.2f") : "N/A") + ',' +
                   std::to_string(report->fp_count);
      }
      std::ostringstream csv;
      csv << "prd,prd_mean_removed,achieved_bps,cr,detections,tp_percent,fp_count\n"
          << fmt(p) << ',' << fmt(p_mr) << ',' << rate_cols << ',' << det_cols << '\n';
      out << csv.str();
      if (!ev_report.empty()) open_out(ev_report) << csv.str();
      if (!ev_plot.empty()) {
        auto plot = open_out(ev_plot);
        plot << "prd,tp_percent\n" << fmt(p) << ','
             << (report && report->tp_percent ? fmt(*report->tp_percent, "%.2f") : "N/A") << '\n';
        if (!ev_gnuplot.empty()) write_gnuplot(ev_gnuplot, ev_plot);
      }
    } else if (batch->parsed()) {
      if (!batch_opts.config_file.empty()) apply_config_file(*batch, batch_opts.config_file);
      const CodecId id = codec_from_name(batch_opts.codec);
      for (double r : batch_opts.rates) check_target_bps(r);
      const DetectorParams params = detector(batch_opts.detector_k);
      struct Entry {
        std::string patient, path, truth;
      };
      std::vector<Entry> entries;
      std::ifstream in(manifest);
      if (!in) throw IoError("cannot open manifest " + manifest);
      for (std::string line; std::getline(in, line);) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        std::istringstream fields(line);
        Entry e;
        fields >> e.patient >> e.path >> e.truth;
        if (e.path.empty()) throw ConfigError("manifest line needs a patient id and a path: " + line);
        const fs::path base = fs::path(manifest).parent_path();
        if (fs::path(e.path).is_relative()) e.path = (base / e.path).string();
        if (!e.truth.empty() && fs::path(e.truth).is_relative()) e.truth = (base / e.truth).string();
        entries.push_back(e);
      }
      if (entries.empty()) throw ConfigError("manifest lists no recordings");
      fs::create_directories(out_dir);
      for (double rate : batch_opts.rates) {
        std::vector<NamedReport> rows;
        std::ostringstream rd;
        rd << "patient,prd,tp_percent,achieved_bps,cr\n";
        for (const auto& e : entries) {
          const Recording rec = read_recording(e.path);
          const auto codec = make_codec(id, codec_config(batch_opts, id, rec));
          const CompressedRecord c = codec->compress(rec.samples, rec.fs, rate);
          Recording recon = rec;
          recon.samples = codec->decompress(c);
          const auto point = rd_point(rec.samples, c, recon.samples);
          const auto truth = e.truth.empty() ? detect(rec, params) : read_flags(e.truth);
          const DetectionReport report = match_flags(truth, detect(recon, params));
          rows.push_back({e.patient, report});
          rd << e.patient << ',' << fmt(point.prd) << ','
             << (report.tp_percent ? fmt(*report.tp_percent, "%.2f") : "N/A") << ',' << fmt(point.achieved_bps)
             << ',' << fmt(point.cr) << '\n';
        }
        const std::string stem = std::string(codec_name(id)) + "_" + fmt(rate, "%g") + "bps";
        const std::string table = (fs::path(out_dir) / ("table_" + stem + ".csv")).string();
        const std::string plot = (fs::path(out_dir) / ("rd_" + stem + ".csv")).string();
        auto t = open_out(table);
        write_report_csv(t, rows);
        open_out(plot) << rd.str();
        out << "wrote " << table << " and " << plot << '\n';
      }
    } else if (detect_cmd->parsed()) {
      if (!det_config.empty()) apply_config_file(*detect_cmd, det_config);
      const auto flags = detect(read_recording(det_in), detector(det_k));
      if (!det_out.empty()) write_flags(det_out, flags);
      out << format_flags(flags);
    } else if (aggregate_cmd->parsed()) {
      std::vector<NamedReport> rows;
      for (const auto& path : agg_in) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::string line;
        std::getline(in, line);
        if (trim(line) != "patient,detections,tp_percent,fp_count") throw FormatError(path + ": unexpected header");
        while (std::getline(in, line)) {
          line = trim(line);
          if (line.empty()) continue;
          std::vector<std::string> f;
          std::istringstream cells(line);
          for (std::string cell; std::getline(cells, cell, ',');) f.push_back(trim(cell));
          if (f.size() != 4) throw FormatError(path + ": expected 4 columns in '" + line + "'");
          if (f[0] == "Average") continue;
          NamedReport row{f[0], {}};
          try {
            row.report.ground_truth_count = f[1].empty() ? 0 : std::stoul(f[1]);
            if (f[2] != "N/A") row.report.tp_percent = std::stod(f[2]);
            row.report.fp_count = std::stoul(f[3]);
          } catch (const std::logic_error&) {
            throw FormatError(path + ": bad number in '" + line + "'");
          }
          rows.push_back(row);
        }
      }
      std::ostringstream csv;
      write_report_csv(csv, rows);
      if (rows.empty()) throw MetricError("no report rows to aggregate");
      out << csv.str();
      if (!agg_report.empty()) open_out(agg_report) << csv.str();
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCodec;
  }
  return kOk;
}

}  // namespace eegc::cli
