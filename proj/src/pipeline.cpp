// SPDX-License-Identifier: Apache-2.0
//
// u2v-chansim: LiDAR-aided UAV-to-vehicle channel simulation toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "u2v/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "u2v/csv.hpp"
#include "u2v/errors.hpp"
#include "u2v/parallel.hpp"
#include "u2v/rng.hpp"
#include "u2v/scenario_io.hpp"
#include "u2v/stats.hpp"
#include "u2v/vxg.hpp"

namespace u2v::pipeline
{
    namespace
    {
        template <typename Fn>
        auto stage(const char *name, Fn &&fn)
        {
            try
            {
                return fn();
            }
            catch (const StageError &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                throw StageError(name, e.what());
            }
        }

        std::string metrics_header()
        {
            return "snapshot,split,tp,fp,fn,tn,precision,recall,f1,precision_degenerate,recall_degenerate,"
                   "f1_degenerate,mean_abs_count_error";
        }

        std::string metrics_row(const std::string &label, const std::string &split, const scatter::MetricsReport &r)
        {
            std::ostringstream os;
            os << label << ',' << split << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.tn << ','
               << csv::num(r.precision) << ',' << csv::num(r.recall) << ',' << csv::num(r.f1) << ','
               << int(r.precision_degenerate) << ',' << int(r.recall_degenerate) << ',' << int(r.f1_degenerate) << ','
               << csv::num(r.mean_abs_count_error);
            return os.str();
        }

        std::string stats_header(const ScenarioManifest &m, std::uint64_t seed, const char *what,
                                 const std::vector<std::pair<std::string, std::string>> &extra,
                                 const std::string &columns)
        {
            const auto &s = m.stats;
            std::ostringstream os;
            os << "# u2v-chansim " << what << "\n"
               << "# manifest: " << m.source.string() << "\n"
               << "# seed: " << seed << "\n"
               << "# estimator: " << (s.estimator == StatsEstimator::ensemble ? "ensemble" : "time_average") << "\n"
               << "# realizations: " << (s.estimator == StatsEstimator::ensemble ? s.realizations : 1) << "\n"
               << "# carrier_hz: " << csv::num(m.channel.rf.carrier_hz) << "\n"
               << "# chi: " << csv::num(m.channel.rf.chi) << "\n"
               << "# ricean: " << (m.channel.rf.ricean ? csv::num(*m.channel.rf.ricean) : std::string("auto")) << "\n"
               << "# eta_gr: " << csv::num(m.channel.rf.eta_gr) << "\n"
               << "# dt_s: " << csv::num(m.dt) << "\n";
            for (const auto &[k, v] : extra)
                os << "# " << k << ": " << v << "\n";
            os << "# columns: " << columns << "\n";
            return os.str();
        }

        std::string grid_name(const char *stem, std::size_t i) { return std::string(stem) + expand_pattern("_{i}", i); }

        std::vector<double> linspace(double a, double b, std::size_t n)
        {
            std::vector<double> out(n, a);
            for (std::size_t i = 1; i < n; ++i)
                out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
            return out;
        }

        struct Inputs
        {
            Trajectory tx, rx;
        };

        Inputs read_inputs(const ScenarioManifest &m)
        {
            Inputs in{io::read_trajectory(m.resolve(m.files.tx_trajectory)),
                      io::read_trajectory(m.resolve(m.files.rx_trajectory))};
            for (const double t : snapshot_times(m))
                if (!in.tx.covers(t) || !in.rx.covers(t))
                    throw DomainError("trajectories do not cover snapshot time " + csv::num(t));
            return in;
        }

        std::vector<VoxelGrid> preprocess(const ScenarioManifest &m, const Inputs &in, std::size_t jobs)
        {
            const auto times = snapshot_times(m);
            std::vector<VoxelGrid> out(m.snapshots);
            parallel_for(m.snapshots, jobs, [&](std::size_t i)
                         {
                lidar::Snapshot snap{io::read_cloud(m.resolve(m.files.tx_clouds, i), m.files.cloud_frame),
                                     io::read_cloud(m.resolve(m.files.rx_clouds, i), m.files.cloud_frame),
                                     in.tx.pose_at(times[i]), in.rx.pose_at(times[i])};
                out[i] = lidar::build_feature_grid(snap, m.filter, m.convention); });
            return out;
        }

        std::vector<scatter::ScattererGrid> load_truth(const ScenarioManifest &m, std::size_t jobs)
        {
            if (m.files.truth_grids.empty())
                throw ConfigError("files.truth_grids is not set");
            std::vector<scatter::ScattererGrid> out(m.snapshots);
            parallel_for(m.snapshots, jobs, [&](std::size_t i)
                         { out[i] = scatter::load_scatterers(m.resolve(m.files.truth_grids, i), m.filter.roi); });
            return out;
        }

        std::vector<std::string> split_labels(std::size_t n, const io::DatasetSplit &split)
        {
            std::vector<std::string> out(n, "all");
            for (auto i : split.train)
                out[i] = "train";
            for (auto i : split.validation)
                out[i] = "validation";
            for (auto i : split.test)
                out[i] = "test";
            return out;
        }
    }

    std::uint64_t effective_seed(const ScenarioManifest &m, const RunOptions &options)
    {
        return options.seed.value_or(m.seed);
    }

    std::vector<double> snapshot_times(const ScenarioManifest &m)
    {
        std::vector<double> t(m.snapshots);
        for (std::size_t i = 0; i < m.snapshots; ++i)
            t[i] = m.snapshot_time(i);
        return t;
    }

    void write_metrics_csv(std::ostream &os, std::span<const scatter::MetricsReport> reports,
                           std::span<const std::string> labels, std::span<const std::string> splits)
    {
        os << metrics_header() << "\n";
        std::vector<scatter::MetricsReport> pooled;
        bool any_test = std::ranges::find(splits, std::string("test")) != splits.end();
        for (std::size_t i = 0; i < reports.size(); ++i)
        {
            os << metrics_row(labels[i], splits[i], reports[i]) << "\n";
            if (!any_test || splits[i] == "test")
                pooled.push_back(reports[i]);
        }
        const std::string scope = any_test ? "test" : "all";
        if (!pooled.empty())
        {
            os << metrics_row("micro", scope, scatter::micro_average(pooled)) << "\n";
            os << metrics_row("macro", scope, scatter::macro_average(pooled)) << "\n";
        }
    }

    std::string evaluate_files(const std::filesystem::path &pred, const std::filesystem::path &truth,
                               double round_threshold)
    {
        const auto t = scatter::load_scatterers(truth);
        const auto p = scatter::round_predictions(scatter::load_predictions(pred, t.roi), round_threshold);
        return metrics_header() + "\n" + metrics_row(pred.filename().string(), "all", scatter::evaluate(p, t)) + "\n";
    }

    Trace run(const ScenarioManifest &m, const RunOptions &options, Goal goal)
    {
        const std::uint64_t seed = effective_seed(m, options);
        const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
        const auto &out = options.out_dir;
        const auto times = snapshot_times(m);
        Trace trace;

        const Inputs inputs = stage("preprocess", [&] { return read_inputs(m); });
        const bool needs_features = goal == Goal::preprocess || m.predictor.kind == scatter::PredictorKind::baseline;
        if (needs_features)
            trace.features = stage("preprocess", [&] { return preprocess(m, inputs, jobs); });
        if (goal == Goal::preprocess || (goal == Goal::simulate && needs_features))
            for (std::size_t i = 0; i < m.snapshots; ++i)
                vxg::write(trace.features[i], out / "features" / (grid_name("features", i) + ".vxg"));
        if (goal == Goal::preprocess)
            return trace;

        const bool want_metrics = goal == Goal::evaluate || (goal == Goal::simulate && !m.files.truth_grids.empty());
        std::vector<scatter::ScattererGrid> truth;
        if (want_metrics || m.predictor.calibrate)
            truth = stage("metrics", [&] { return load_truth(m, jobs); });

        io::DatasetSplit split;
        trace.params = m.predictor.params;
        trace.raw_predictions = stage("predictor", [&]
                                      {
            std::vector<scatter::RawPredictionGrid> raw(m.snapshots);
            if (m.predictor.kind == scatter::PredictorKind::file)
            {
                parallel_for(m.snapshots, jobs, [&](std::size_t i)
                             { raw[i] = scatter::load_predictions(m.resolve(m.files.prediction_grids, i), m.filter.roi); });
                return raw;
            }
            if (m.predictor.calibrate)
            {
                split = io::split_dataset(m.snapshots, seed);
                std::vector<scatter::TrainingPair> training;
                for (auto i : split.train)
                    training.emplace_back(trace.features[i], truth[i]);
                auto lattice = scatter::CalibrationLattice::standard();
                lattice.d_norm = m.predictor.params.d_norm;
                trace.params = scatter::calibrate_baseline(training, lattice);
                trace.calibrated = true;
            }
            parallel_for(m.snapshots, jobs, [&](std::size_t i)
                         { raw[i] = scatter::baseline_predict(trace.features[i], trace.params); });
            return raw; });

        trace.scatterers = stage("rounding", [&]
                                 {
            std::vector<scatter::ScattererGrid> s(m.snapshots);
            for (std::size_t i = 0; i < m.snapshots; ++i)
                s[i] = scatter::round_predictions(trace.raw_predictions[i], trace.params.round_threshold);
            return s; });

        if (want_metrics)
        {
            trace.metrics = stage("metrics", [&]
                                  {
                std::vector<scatter::MetricsReport> r(m.snapshots);
                for (std::size_t i = 0; i < m.snapshots; ++i)
                    r[i] = scatter::evaluate(trace.scatterers[i], truth[i]);
                return r; });
            std::vector<std::string> labels(m.snapshots);
            for (std::size_t i = 0; i < m.snapshots; ++i)
                labels[i] = std::to_string(i);
            const auto splits = split_labels(m.snapshots, split);
            std::ostringstream os;
            write_metrics_csv(os, trace.metrics, labels, splits);
            io::write_text(out / "metrics.csv", os.str());
        }

        if (goal == Goal::predict || goal == Goal::simulate)
        {
            for (std::size_t i = 0; i < m.snapshots; ++i)
            {
                scatter::store_predictions(trace.raw_predictions[i], out / "predictions" / (grid_name("pred", i) + ".vxg"));
                scatter::store_scatterers(trace.scatterers[i], out / "scatterers" / (grid_name("scat", i) + ".vxg"));
            }
            if (trace.calibrated)
            {
                const auto &p = trace.params;
                io::write_text(out / "calibration.csv",
                               "alpha,beta,d_norm,round_threshold\n" + csv::num(p.alpha) + "," + csv::num(p.beta) +
                                   "," + csv::num(p.d_norm) + "," + csv::num(p.round_threshold) + "\n");
            }
        }
        if (goal == Goal::predict || goal == Goal::evaluate)
            return trace;

        trace.clusters = stage("clustering", [&]
                               {
            std::vector<clusters::ClusterSet> sets(m.snapshots);
            for (std::size_t i = 0; i < m.snapshots; ++i)
                sets[i] = clusters::classify(clusters::extract_clusters(trace.scatterers[i], times[i]), m.cluster_height);
            trace.tracks = clusters::track(sets, m.effective_match_radius());
            return clusters::apply_tracks(sets, trace.tracks, m.dt); });

        const channel::ChannelSimulator sim = stage("channel", [&]
                                                    {
            m.channel.validate();
            return channel::ChannelSimulator(inputs.tx, inputs.rx, trace.clusters, m.channel); });

        if (goal == Goal::simulate)
        {
            const auto realization = stage("channel", [&] { return sim.realize(substream_seed(seed, 0)); });
            const auto &rf = m.channel.rf;
            const auto freqs = m.stats.transfer_points == 1
                                   ? std::vector<double>{rf.carrier_hz}
                                   : linspace(rf.carrier_hz - rf.bandwidth_hz / 2, rf.carrier_hz + rf.bandwidth_hz / 2,
                                              m.stats.transfer_points);
            const auto transfer = stage("channel", [&] { return channel::transfer_grid(realization, freqs); });

            std::ostringstream cl;
            clusters::write_csv(cl, trace.clusters);
            io::write_text(out / "clusters.csv", cl.str());
            std::ostringstream cir;
            channel::write_cir_csv(cir, realization);
            io::write_text(out / "cir.csv", cir.str());
            vxg::write(transfer, out / "transfer.vxg");
        }

        // statistics
        const auto &st = m.stats;
        const auto &rf = m.channel.rf;
        const stats::Realizer realizer = [&sim](std::uint64_t s) { return sim.realize(s); };
        const stats::EnsembleOptions ens{st.realizations, seed, jobs};
        std::optional<channel::ChannelRealization> single;
        if (st.estimator == StatsEstimator::time_average)
            single = stage("stats", [&] { return sim.realize(substream_seed(seed, 0)); });

        std::size_t in_window = 0;
        for (const double t : times)
            if (t <= rf.window_end * (1 + 1e-12) + 1e-12)
                ++in_window;

        for (std::size_t a = 0; a < st.anchor_times.size(); ++a)
        {
            const double anchor = st.anchor_times[a];
            const double pos = (anchor - m.start_time) / m.dt;
            const auto k = static_cast<std::size_t>(std::max(0.0, std::round(pos)));
            if (std::abs(pos - std::round(pos)) > 1e-6 || k >= in_window)
                throw StageError("stats", "anchor time " + csv::num(anchor) + " is not a snapshot inside the window");
            const std::size_t lags = std::min(st.max_lag, in_window - 1 - k);

            std::vector<double> dts(lags + 1);
            for (std::size_t l = 0; l <= lags; ++l)
                dts[l] = static_cast<double>(l) * m.dt;
            const auto t_acf = stage("stats", [&]
                                     { return st.estimator == StatsEstimator::ensemble
                                                  ? stats::tacf(realizer, anchor, rf.carrier_hz, dts, ens)
                                                  : stats::tacf_time_average(*single, anchor, rf.window_end,
                                                                             rf.carrier_hz, lags); });
            const auto spectrum = stage("stats", [&]
                                        { return stats::dpsd(stats::hermitian_extend(t_acf), m.dt, st.taper); });

            const std::string anchor_text = csv::num(anchor);
            std::ostringstream tf;
            tf << stats_header(m, seed, "tacf", {{"anchor_time_s", anchor_text}, {"frequency_hz", csv::num(rf.carrier_hz)}, {"max_lag", std::to_string(lags)}},
                               "delta_t_s = time offset [s]; abs_tacf = |normalized TACF|")
               << "delta_t_s,abs_tacf\n";
            for (std::size_t l = 0; l <= lags; ++l)
                tf << csv::num(dts[l]) << ',' << csv::num(std::abs(t_acf[l])) << "\n";
            io::write_text(out / ("tacf_a" + std::to_string(a) + ".csv"), tf.str());

            std::ostringstream df;
            df << stats_header(m, seed, "dpsd", {{"anchor_time_s", anchor_text}, {"taper", st.taper == stats::Taper::hann ? "hann" : "rectangular"}, {"resolution_hz", csv::num(spectrum.resolution)}},
                               "f_d_hz = Doppler frequency [Hz]; dpsd = |DPSD| of the two-sided TACF [1/Hz]")
               << "f_d_hz,dpsd\n";
            for (std::size_t i = 0; i < spectrum.frequencies.size(); ++i)
                df << csv::num(spectrum.frequencies[i]) << ',' << csv::num(spectrum.density[i]) << "\n";
            io::write_text(out / ("dpsd_a" + std::to_string(a) + ".csv"), df.str());

            for (std::size_t j = 0; j < st.fcf_frequencies.size(); ++j)
            {
                const double fa = st.fcf_frequencies[j];
                const auto dfs = linspace(0.0, st.fcf_span_hz, st.fcf_points);
                const auto f_cf = stage("stats", [&]
                                        { return st.estimator == StatsEstimator::ensemble
                                                     ? stats::fcf(realizer, anchor, fa, dfs, ens)
                                                     : stats::fcf_time_average(*single, anchor, rf.window_end, fa, dfs); });
                std::ostringstream ff;
                ff << stats_header(m, seed, "fcf", {{"anchor_time_s", anchor_text}, {"frequency_hz", csv::num(fa)}},
                                   "delta_f_hz = frequency offset [Hz]; abs_fcf = |normalized FCF|")
                   << "delta_f_hz,abs_fcf\n";
                for (std::size_t i = 0; i < dfs.size(); ++i)
                    ff << csv::num(dfs[i]) << ',' << csv::num(std::abs(f_cf[i])) << "\n";
                io::write_text(out / ("fcf_a" + std::to_string(a) + "_f" + std::to_string(j) + ".csv"), ff.str());
            }
        }
        return trace;
    }
}
