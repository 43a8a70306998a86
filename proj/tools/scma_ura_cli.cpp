// scma_ura: theory tables, Monte Carlo sweeps, barring campaigns, group
// scaling and oracle checks for SCMA slotted-ALOHA random access.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <scma_ura/scma_ura.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace scma_ura;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitMismatch = 4;

int exit_code_for(ErrorCode c)
{
    switch (c) {
    case ErrorCode::UnsupportedDv: return kExitUnsupported;
    case ErrorCode::EmptyMatrix:
    case ErrorCode::NonRegular:
    case ErrorCode::DuplicateColumn:
    case ErrorCode::MalformedInput:
    case ErrorCode::UnknownName:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidConfig:
    case ErrorCode::TooLarge: return kExitBadInput;
    default: return kExitRuntime;
    }
}

std::string num(double v, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

struct Options {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    int threads = -1;
    std::string codebook_arg; // validate only
};

struct Context {
    ConfigMap map;
    fs::path out;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    std::ofstream open(const std::string& name) const
    {
        fs::create_directories(out);
        std::ofstream f(out / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + (out / name).string());
        return f;
    }

    void write_summary(const std::string& verb, const SimConfig& cfg, json results) const
    {
        json j;
        j["command"] = verb;
        j["seed"] = cfg.seed;
        json config = json::object();
        for (const auto& [k, v] : map.values())
            config[k] = v;
        j["config"] = config;
        j["effective"] = {
            {"codebook", cfg.codebook},
            {"replications", cfg.replications},
            {"slots_per_replication", cfg.slots_per_replication},
            {"slots_per_frame", cfg.slots_per_frame},
            {"frames", cfg.n_frames},
            {"decoder_policy", to_string(cfg.policy)},
            {"observability", to_string(cfg.observability)},
        };
        j["results"] = std::move(results);
        j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        auto f = open("summary.json");
        f << j.dump(2) << '\n';
    }
};

Context make_context(const Options& o)
{
    Context c;
    if (!o.config_path.empty())
        c.map.load(o.config_path);
    for (const auto& s : o.overrides)
        c.map.set_override(s);
    if (o.threads >= 0)
        c.map.set("sim.threads", std::to_string(o.threads));
    if (!o.out_dir.empty())
        c.out = o.out_dir;
    else if (const char* env = std::getenv("SCMA_URA_OUTPUT_DIR"); env && *env)
        c.out = env;
    else
        c.out = "scma_ura_out";
    return c;
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"half_width", e.half_width}}; }

int cmd_theory(const Context& ctx)
{
    const SimConfig cfg = to_sim_config(ctx.map);
    const auto f = resolve_codebook(cfg.codebook);
    const auto& p = f.params();
    auto grid = GridSpec::default_for(p);
    grid.start = ctx.map.get_double("theory.start", grid.start);
    grid.stop = ctx.map.get_double("theory.stop", grid.stop);
    grid.step = ctx.map.get_double("theory.step", grid.step);
    const auto table = build_load_table(p, grid);

    auto csv = ctx.open("theory.csv");
    write_load_table_csv(csv, table, true);

    const double oma_peak = oma_throughput(p.n_fn, p.n_fn);
    std::cout << "codebook=" << cfg.codebook << " N=" << p.n_fn << " K=" << p.n_cb << "\n"
              << "lambda_star=" << num(table.lambda_star, 2) << " peak=" << num(table.t_star, 4)
              << " p_idle_star=" << num(table.p_idle_star, 4) << " oma_peak=" << num(oma_peak, 3) << "\n";

    ctx.write_summary("theory", cfg,
        {{"lambda_star", table.lambda_star}, {"peak_throughput", table.t_star}, {"p_idle_star", table.p_idle_star},
            {"oma_peak", oma_peak}, {"grid_points", table.points.size()}});
    return kExitOk;
}

void write_trace_file(const Context& ctx, const SimConfig& cfg, const IndicatorMatrix& f)
{
    const std::string path = ctx.map.get("trace.path", "");
    if (path.empty())
        return;
    const long long slots = ctx.map.get_int("trace.slots", 100);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write trace " + path);
    const SlotRunner runner{&f, cfg.policy, cfg.observability};
    Rng rng = make_stream(cfg.seed, stream_kind::trace, 0);
    DecodeOutcome outcome;
    for (long long s = 0; s < slots; ++s) {
        runner.run(cfg.rate, 1.0, rng, &outcome);
        write_trace(out, static_cast<int>(s), outcome);
    }
}

int cmd_sweep(const Context& ctx)
{
    const SimConfig cfg = to_sim_config(ctx.map);
    const auto f = resolve_codebook(cfg.codebook);
    const auto loads = grid_values(cfg.sweep);
    const bool has_theory = f.params().d_v == 2;

    const auto ic = run_sweep(cfg, f, loads);
    SimConfig jcfg = cfg;
    jcfg.policy = DecoderPolicy::JmpaOnly;
    const auto jm = run_sweep(jcfg, f, loads);

    auto csv = ctx.open("sweep.csv");
    csv << "lambda_bar,ic_first,ic_first_ci,jmpa_only,jmpa_only_ci,theory,theory_jmpa_only,"
           "p_idle,p_idle_ci,theory_p_idle,ic_share,mean_active\n";
    json points = json::array();
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const auto& a = ic.points[i];
        const auto& b = jm.points[i];
        std::string th, th1, thi;
        json jp = {{"lambda_bar", loads[i]}, {"ic_first", estimate_json(a.throughput)},
            {"jmpa_only", estimate_json(b.throughput)}, {"p_idle", estimate_json(a.p_idle)}};
        if (has_theory) {
            const auto t = throughput_terms(loads[i], f.params());
            const double pi = idle_probability(loads[i], f.params());
            th = num(t.total, 6);
            th1 = num(t.t1, 6);
            thi = num(pi, 6);
            jp["theory"] = t.total;
            jp["theory_jmpa_only"] = t.t1;
            jp["theory_p_idle"] = pi;
        }
        csv << num(loads[i], 4) << ',' << num(a.throughput.mean, 6) << ',' << num(a.throughput.half_width, 6) << ','
            << num(b.throughput.mean, 6) << ',' << num(b.throughput.half_width, 6) << ',' << th << ',' << th1 << ','
            << num(a.p_idle.mean, 6) << ',' << num(a.p_idle.half_width, 6) << ',' << thi << ','
            << num(a.ic_fraction, 6) << ',' << num(a.mean_active, 6) << '\n';
        std::cout << "lambda_bar=" << num(loads[i], 2) << " ic_first=" << num(a.throughput.mean, 4) << " +- "
                  << num(a.throughput.half_width, 4) << " jmpa_only=" << num(b.throughput.mean, 4)
                  << (has_theory ? " theory=" + th : "") << "\n";
        points.push_back(std::move(jp));
    }
    write_trace_file(ctx, cfg, f);
    ctx.write_summary("sweep", cfg, {{"points", std::move(points)}});
    return kExitOk;
}

int cmd_barring(const Context& ctx)
{
    SimConfig base;
    base.arrival = ArrivalMode::Schedule;
    SimConfig cfg = to_sim_config(ctx.map, base);
    const auto f = resolve_codebook(cfg.codebook);
    const auto table = build_load_table(f.params());

    SimConfig on = cfg;
    on.barring = true;
    SimConfig off = cfg;
    off.barring = false;
    const auto r_on = run_barring_campaign(on, f, table);
    const auto r_off = run_barring_campaign(off, f, table);

    {
        auto csv = ctx.open("barring_on.csv");
        write_history_csv(csv, r_on.history);
    }
    {
        auto csv = ctx.open("barring_off.csv");
        write_history_csv(csv, r_off.history);
    }
    {
        auto csv = ctx.open("estimation.csv");
        csv << "frame,lambda_bar_true,alpha,admitted_load,lambda_hat\n";
        for (const auto& r : r_on.history)
            csv << r.frame << ',' << num(r.lambda_bar_true, 4) << ',' << num(r.alpha, 8) << ','
                << num(r.admitted_load(), 6) << ',' << num(r.lambda_hat, 4) << '\n';
    }

    const int last = cfg.n_frames;
    const int first = last > 100 ? 101 : 1;
    const double t_on = r_on.mean_throughput(first, last);
    const double t_off = r_off.mean_throughput(first, last);
    std::cout << "frames " << first << "-" << last << ": throughput with barring=" << num(t_on, 4) << " ("
              << num(100 * t_on / table.t_star, 1) << "% of peak " << num(table.t_star, 4) << "), without="
              << num(t_off, 4) << " (" << num(100 * t_off / table.t_star, 1) << "%)\n"
              << "estimate mean absolute error=" << num(r_on.estimate_mae(), 4) << "\n";

    ctx.write_summary("barring", cfg,
        {{"window", {first, last}}, {"peak_throughput", table.t_star}, {"lambda_star", table.lambda_star},
            {"mean_throughput_barring", t_on}, {"mean_throughput_no_barring", t_off},
            {"estimate_mae", r_on.estimate_mae()}});
    return kExitOk;
}

int cmd_groups(const Context& ctx)
{
    const SimConfig cfg = to_sim_config(ctx.map);
    const auto f = resolve_codebook(cfg.codebook);
    const auto list = ctx.map.get_list("groups.list",
        ctx.map.has("sim.groups") ? std::vector<double>{static_cast<double>(cfg.n_groups)} : std::vector<double>{1, 2, 4});
    const double per_group = ctx.map.has("groups.load") ? ctx.map.get_double("groups.load", 0.0)
                                                        : build_load_table(f.params()).lambda_star;

    const auto single = run_groups(cfg, f, 1, per_group);
    auto csv = ctx.open("groups.csv");
    csv << "groups,lambda_total,aggregate,aggregate_ci,single_group,ratio\n";
    json rows = json::array();
    for (double gd : list) {
        const int g = static_cast<int>(gd);
        if (g < 1 || g != gd)
            throw Error(ErrorCode::InvalidConfig, "groups.list entries must be positive integers");
        const auto r = g == 1 ? single : run_groups(cfg, f, g, per_group * g);
        const double ratio = r.aggregate.mean / (g * single.aggregate.mean);
        csv << g << ',' << num(r.lambda_total, 4) << ',' << num(r.aggregate.mean, 6) << ','
            << num(r.aggregate.half_width, 6) << ',' << num(single.aggregate.mean, 6) << ',' << num(ratio, 6) << '\n';
        std::cout << "G=" << g << " lambda_total=" << num(r.lambda_total, 2) << " aggregate=" << num(r.aggregate.mean, 4)
                  << " +- " << num(r.aggregate.half_width, 4) << " ratio=" << num(ratio, 4) << "\n";
        rows.push_back({{"groups", g}, {"lambda_total", r.lambda_total}, {"aggregate", estimate_json(r.aggregate)},
            {"ratio", ratio}});
    }
    ctx.write_summary("groups", cfg, {{"per_group_load", per_group}, {"rows", std::move(rows)}});
    return kExitOk;
}

int cmd_oracle(const Context& ctx)
{
    SimConfig base;
    base.codebook = "f4x6";
    SimConfig cfg = to_sim_config(ctx.map, base);
    cfg.slots_per_replication = ctx.map.get_int("oracle.mc_slots", cfg.slots_per_replication);
    cfg.validate();
    const auto f = resolve_codebook(cfg.codebook);
    const int max_users = static_cast<int>(ctx.map.get_int("oracle.max_users", 6));
    const auto residual = cfg.policy == DecoderPolicy::AllOrNothing ? ResidualPolicy::AllOrNothing
                                                                     : ResidualPolicy::ComponentWise;
    const bool whole = residual == ResidualPolicy::AllOrNothing;

    long long patterns = 0;
    long long mismatches = 0;
    for (int n = 0; n <= max_users; ++n)
        for_each_selection(f.n_cb(), n, [&](const std::vector<int>& choice) {
            std::vector<int> counts(f.n_cb(), 0);
            for (int c : choice)
                ++counts[c];
            const auto got = decode(SlotPattern(counts), f, residual).decoded_cbs();
            if (std::set<int>(got.begin(), got.end()) != reference::decodable(f, counts, whole))
                ++mismatches;
            ++patterns;
        });
    std::cout << "patterns=" << patterns << " mismatches=" << mismatches << "\n";

    const auto rates = ctx.map.get_list("oracle.rates", {1, 2, 3});
    SimConfig mc = cfg;
    if (mc.policy == DecoderPolicy::JmpaOnly)
        mc.policy = DecoderPolicy::ComponentWise;
    const auto sweep = run_sweep(mc, f, rates);
    const boost::math::students_t dist(mc.replications - 1);
    const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));

    auto csv = ctx.open("oracle.csv");
    csv << "lambda_bar,monte_carlo,monte_carlo_ci,enumerated,z\n";
    json checks = json::array();
    bool mc_ok = true;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const double exact = poisson_mixed_throughput(f, rates[i], mc.policy);
        const auto& e = sweep.points[i].throughput;
        const double se = e.half_width / tq;
        const double z = se > 0 ? (e.mean - exact) / se : 0.0;
        mc_ok = mc_ok && std::abs(z) <= 3.0;
        csv << num(rates[i], 4) << ',' << num(e.mean, 6) << ',' << num(e.half_width, 6) << ',' << num(exact, 6) << ','
            << num(z, 3) << '\n';
        std::cout << "lambda_bar=" << num(rates[i], 2) << " monte_carlo=" << num(e.mean, 4) << " enumerated="
                  << num(exact, 4) << " z=" << num(z, 2) << "\n";
        checks.push_back({{"lambda_bar", rates[i]}, {"monte_carlo", estimate_json(e)}, {"enumerated", exact}, {"z", z}});
    }
    ctx.write_summary("oracle", cfg,
        {{"patterns", patterns}, {"mismatches", mismatches}, {"poissonization", std::move(checks)}});
    if (mismatches != 0 || !mc_ok) {
        std::cerr << "oracle mismatch\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_validate(const Context& ctx, const std::string& selector)
{
    const std::string which = selector.empty() ? ctx.map.get("codebook", "f6x15") : selector;
    const auto f = resolve_codebook(which);
    const auto& p = f.params();
    std::cout << "codebook=" << which << "\n"
              << "N=" << p.n_fn << " K=" << p.n_cb << " d_v=" << p.d_v << " d_f=" << p.d_f << " theta=" << num(p.theta, 4)
              << "\n"
              << "n_orth=" << p.n_orth << " n_orth_closed_form=" << p.n_orth_closed_form() << "\n"
              << "jmpa_complexity=" << num(p.jmpa_complexity(), 0) << " ic_complexity=" << num(p.ic_complexity(), 0)
              << "\n";
    for (const auto& w : f.warnings())
        std::cout << "warning: " << w << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SCMA slotted-ALOHA random access toolkit"};
    app.require_subcommand(1, 1);

    Options opt;
    app.add_option("--config", opt.config_path, "key = value configuration file");
    app.add_option("--out", opt.out_dir, "output directory (default: $SCMA_URA_OUTPUT_DIR or ./scma_ura_out)");
    app.add_option("--set", opt.overrides, "override a configuration key, e.g. --set sim.seed=42")->take_all();
    app.add_option("--threads", opt.threads, "worker thread cap (0: all cores)")->check(CLI::NonNegativeNumber);

    auto* theory = app.add_subcommand("theory", "closed-form throughput and idle-probability table");
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo throughput sweep against theory");
    auto* barring = app.add_subcommand("barring", "frame-by-frame campaign with and without access barring");
    auto* groups = app.add_subcommand("groups", "aggregate throughput of independent codebook groups");
    auto* oracle = app.add_subcommand("oracle", "check the decoder against exhaustive enumeration");
    auto* validate = app.add_subcommand("validate", "check an indicator matrix and print its parameters");
    validate->add_option("codebook", opt.codebook_arg, "built-in name or matrix file");
    for (auto* s : {theory, sweep, barring, groups, oracle, validate})
        s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitBadInput;
    }

    try {
        const Context ctx = make_context(opt);
        if (theory->parsed())
            return cmd_theory(ctx);
        if (sweep->parsed())
            return cmd_sweep(ctx);
        if (barring->parsed())
            return cmd_barring(ctx);
        if (groups->parsed())
            return cmd_groups(ctx);
        if (oracle->parsed())
            return cmd_oracle(ctx);
        return cmd_validate(ctx, opt.codebook_arg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
