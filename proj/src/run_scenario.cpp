#include "molcool/run_scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <optional>

#include "molcool/constants.hpp"
#include "molcool/errors.hpp"
#include "molcool/io.hpp"

namespace molcool {

namespace {

// per-sample entropy bookkeeping; streams CSV rows and feeds capture/summary
class EntropySink {
 public:
  EntropySink(double s_radiation, CsvWriter* csv, RunCapture* capture, RunSummary* summary)
      : s_rad_(s_radiation), csv_(csv), capture_(capture), summary_(summary) {}

  static std::vector<std::string> csv_header() {
    return {"time",  "cycle", "step", "substep", "step_phase", "fig_phase",   "S_I",
            "S_cm",  "S_tot", "S_R",  "I_C",     "al_lower",   "al_upper",    "al_violation"};
  }

  void operator()(const SnapshotMeta& meta, const PopulationField<double>& field) {
    EntropyRecord rec;
    rec.time = meta.t_global;
    rec.cycle = meta.cycle;
    rec.step = meta.step;
    rec.s_internal = shannon(internal_distribution(field));
    rec.s_cm = shannon(cm_distribution(field).values);
    // steps 1 and 2 are unitary on the diagonal model, so the total entropy
    // holds the value frozen at the last decay snapshot
    if (meta.step == 3 || meta.cycle == 0) {
      rec.s_total = total_entropy_step3(field);
      frozen_ = rec.s_total;
    } else {
      rec.s_total = frozen_;
    }
    rec.s_radiation = s_rad_;
    rec.correlation = rec.s_internal + rec.s_cm - rec.s_total;
    const ArakiLiebResult al = araki_lieb_check(rec, araki_lieb_tolerance);

    if (csv_) {
      csv_->field(rec.time)
          .field(meta.cycle)
          .field(meta.step)
          .field(meta.substep)
          .field(meta.step_phase)
          .field(meta.fig_phase)
          .field(rec.s_internal)
          .field(rec.s_cm)
          .field(rec.s_total)
          .field(rec.s_radiation)
          .field(rec.correlation)
          .field(al.lower_margin)
          .field(al.upper_margin)
          .field(!al.pass);
      csv_->end_row();
    }
    if (capture_ || summary_) {
      const double trace = field.trace();
      if (capture_)
        capture_->records.push_back({meta, rec, al, trace, field.overdraft});
      if (summary_) {
        ++summary_->samples;
        summary_->min_al_lower = std::min(summary_->min_al_lower, al.lower_margin);
        summary_->min_al_upper = std::min(summary_->min_al_upper, al.upper_margin);
        summary_->al_all_pass = summary_->al_all_pass && al.pass;
        summary_->max_overdraft = std::max(summary_->max_overdraft, field.overdraft);
        summary_->max_trace_excess =
            std::max(summary_->max_trace_excess, std::abs(trace - 1.0) - field.overdraft);
      }
    }
  }

 private:
  double s_rad_;
  double frozen_ = 0.0;
  CsvWriter* csv_;
  RunCapture* capture_;
  RunSummary* summary_;
};

void write_population_csv(const std::filesystem::path& dir, const SnapshotMeta& meta,
                          const PopulationField<double>& field, const ArrayX<double>& p,
                          std::vector<std::filesystem::path>& written) {
  const std::string name = "populations_cycle" + std::to_string(meta.cycle) + "_step" +
                           std::to_string(meta.step) + ".csv";
  CsvWriter csv(dir / name);
  std::vector<std::string> head{"P"};
  for (int a = 0; a < field.states.count(); ++a) head.push_back(field.states.name(a));
  csv.header(head);
  for (Index i = 0; i < p.size(); ++i) {
    csv.field(p[i]);
    for (int a = 0; a < field.states.count(); ++a)
      csv.field(field.pop[static_cast<std::size_t>(a)][i]);
    csv.end_row();
  }
  csv.close();
  written.push_back(csv.path());
}

void write_fp_csv(const std::filesystem::path& path, const ArrayX<double>& p,
                  const ArrayX<double>& f, std::vector<std::filesystem::path>& written) {
  CsvWriter csv(path);
  csv.header({"P", "f"});
  for (Index i = 0; i < p.size(); ++i) {
    csv.field(p[i]).field(f[i]);
    csv.end_row();
  }
  csv.close();
  written.push_back(csv.path());
}

void write_plot_script(const std::filesystem::path& dir, const ScenarioConfig& sc,
                       std::vector<std::filesystem::path>& written) {
  const std::filesystem::path path = dir / "plot.gp";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# gnuplot commands for the emitted data files\n"
         "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set terminal pngcairo size 1200,800\n";
  if (sc.emit_fig5)
    out << "set output 'entropy.png'\n"
           "set xlabel 'cooling cycle (each step stretched to 1/3)'\n"
           "set ylabel 'entropy [k_B]'\n"
           "plot 'entropy.csv' using 6:7 with lines, \\\n"
           "     '' using 6:8 with lines, \\\n"
           "     '' using 6:9 with lines, \\\n"
           "     '' using 6:11 with lines\n";
  if (sc.emit_fig6)
    out << "set output 'momentum.png'\n"
           "set xlabel 'P [hbar k]'\n"
           "set ylabel 'f(P)'\n"
           "plot 'fP_initial.csv' using 1:2 with lines, \\\n"
           "     'fP_final.csv' using 1:2 with lines\n";
  out.flush();
  if (!out) throw IoError("write failed on " + path.string());
  out.close();
  written.push_back(path);
}

}  // namespace

std::filesystem::path resolved_output_dir(const ScenarioConfig& sc) {
  if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0')
    return env;
  return sc.output_dir;
}

double distribution_mean(const ArrayX<double>& p, const ArrayX<double>& f) {
  const double total = f.sum();
  if (!(total > 0.0)) throw ModelError("distribution_mean: empty distribution");
  return (p * f).sum() / total;
}

double distribution_fwhm(const ArrayX<double>& p, const ArrayX<double>& f) {
  Index imax = 0;
  const double peak = f.maxCoeff(&imax);
  if (!(peak > 0.0)) throw ModelError("distribution_fwhm: empty distribution");
  const double half = peak / 2.0;
  double left = p[0];
  for (Index i = 0; i <= imax; ++i) {
    if (f[i] >= half) {
      left = i == 0 ? p[0]
                    : p[i - 1] + (half - f[i - 1]) * (p[i] - p[i - 1]) / (f[i] - f[i - 1]);
      break;
    }
  }
  const Index last = p.size() - 1;
  double right = p[last];
  for (Index i = last; i >= imax; --i) {
    if (f[i] >= half) {
      right = i == last
                  ? p[last]
                  : p[i + 1] - (half - f[i + 1]) * (p[i + 1] - p[i]) / (f[i] - f[i + 1]);
      break;
    }
  }
  return right - left;
}

RunSummary execute_scenario(const ScenarioConfig& sc, const std::filesystem::path& outdir,
                            bool write_files, RunCapture* capture) {
  const auto t0 = std::chrono::steady_clock::now();

  CoolingEngine<double> engine(sc.engine);
  const double s_rad = radiation_entropy(sc.engine.ladder, 181);

  RunSummary summary;
  summary.cycles = engine.schedule().count();
  summary.warnings = engine.schedule().warnings;
  summary.output_dir = outdir;
  summary.min_al_lower = std::numeric_limits<double>::infinity();
  summary.min_al_upper = std::numeric_limits<double>::infinity();

  const ArrayX<double> p = engine.grid().points();
  const ArrayX<double> f_initial = engine.thermal_weights();
  if (capture) {
    capture->p_axis = p;
    capture->f_initial = f_initial;
    capture->s_radiation = s_rad;
  }

  std::vector<std::filesystem::path> written;
  std::optional<CsvWriter> entropy_csv;
  if (write_files) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec)
      throw IoError("cannot create output directory " + outdir.string() + ": " +
                    ec.message());
    if (sc.emit_fig5) {
      entropy_csv.emplace(outdir / "entropy.csv");
      entropy_csv->header(EntropySink::csv_header());
    }
  }

  EntropySink sink(s_rad, entropy_csv ? &*entropy_csv : nullptr, capture, &summary);
  engine.run([&](const SnapshotMeta& meta, const PopulationField<double>& field) {
    sink(meta, field);
    if (write_files && sc.emit_fig3 && meta.step_end)
      write_population_csv(outdir, meta, field, p, written);
  });
  if (entropy_csv) {
    entropy_csv->close();
    written.push_back(entropy_csv->path());
  }

  const ArrayX<double> f_final = cm_distribution(engine.final_field()).values;
  if (capture) capture->f_final = f_final;
  summary.initial_fwhm_hk = distribution_fwhm(p, f_initial);
  summary.final_fwhm_hk = distribution_fwhm(p, f_final);
  summary.final_mean_hk = distribution_mean(p, f_final);

  if (write_files) {
    if (sc.emit_fig6) {
      write_fp_csv(outdir / "fP_initial.csv", p, f_initial, written);
      write_fp_csv(outdir / "fP_final.csv", p, f_final, written);
    }
    if (sc.emit_fig4) {
      // companion trace with a single accumulation channel, same schedule
      ScenarioConfig solo = sc;
      solo.acc_states = 1;
      solo.fc_factors.clear();
      solo.finalize();
      CoolingEngine<double> engine1(solo.engine);
      CsvWriter csv(outdir / "entropy_acc1.csv");
      csv.header(EntropySink::csv_header());
      EntropySink sink1(radiation_entropy(solo.engine.ladder, 181), &csv, nullptr, nullptr);
      engine1.run([&](const SnapshotMeta& meta, const PopulationField<double>& field) {
        sink1(meta, field);
      });
      csv.close();
      written.push_back(csv.path());
    }
    if (sc.emit_plot_script) write_plot_script(outdir, sc, written);

    summary.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    RunManifest manifest;
    manifest.config_hash = sc.config_hash();
    manifest.constants = constants::constant_set;
    manifest.duration_seconds = summary.duration_seconds;
    std::sort(written.begin(), written.end());
    for (const auto& file : written)
      manifest.files.emplace_back(file.filename().string(), file_checksum_hex(file));
    write_manifest(outdir / "manifest.json", manifest);
  } else {
    summary.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return summary;
}

}  // namespace molcool
