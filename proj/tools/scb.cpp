#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scb/codemeta.hpp"
#include "scb/examples_gen.hpp"
#include "scb/fixture.hpp"
#include "scb/interp.hpp"
#include "scb/lint.hpp"
#include "scb/seed.hpp"
#include "scb/service.hpp"

namespace fs = std::filesystem;
using namespace scb;

namespace {

// Exit codes are a stable contract: 0 ok, 1 lint errors, 2 bad input,
// 3 unknown identity, 4 transport failure.
constexpr int kExitOk = 0;
constexpr int kExitLint = 1;
constexpr int kExitInput = 2;
constexpr int kExitIdentity = 3;
constexpr int kExitTransport = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    if (!out) throw ConfigError("cannot write " + path);
}

Program load_program(const std::string& path) { return parse_program(read_file(path)); }

// "flag@0" or "key:space@12"
EventInjection parse_event(const std::string& text) {
    auto at = text.rfind('@');
    if (at == std::string::npos)
        throw ConfigError("bad event \"" + text + "\": expected flag@TICK or key:K@TICK");
    EventInjection ev;
    std::string head = text.substr(0, at);
    std::string tick = text.substr(at + 1);
    try {
        std::size_t used = 0;
        ev.tick = std::stoll(tick, &used);
        if (used != tick.size() || ev.tick < 0) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw ConfigError("bad event tick in \"" + text + "\"");
    }
    if (head == "flag") return ev;
    if (head.rfind("key:", 0) == 0 && head.size() > 4) {
        ev.key = head.substr(4);
        return ev;
    }
    throw ConfigError("bad event \"" + text + "\": expected flag@TICK or key:K@TICK");
}

std::string session_file(const std::string& name) {
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'))
            throw ConfigError("bad session name \"" + name +
                              "\": use letters, digits, - and _");
    }
    return (fs::path(".scb-sessions") / (name + ".json")).string();
}

struct RunArgs {
    std::string program_path;
    std::string viewer;
    std::string store_path;
    std::string url;
    std::vector<std::string> events;
    std::vector<std::string> answers;
    long long max_ticks = 10000;
    int latency_ticks = 1;
    long long page_limit = 20;
    std::string session_name;
    bool fresh = false;
};

int cmd_run(const RunArgs& args) {
    Program program = load_program(args.program_path);

    if (args.store_path.empty() == args.url.empty())
        throw ConfigError("exactly one of --store or --url is required");

    CommunityStore store;
    std::unique_ptr<ServiceCore> core;
    std::shared_ptr<Transport> transport;
    if (!args.store_path.empty()) {
        store = CommunityStore::from_json(read_file(args.store_path));
        core = std::make_unique<ServiceCore>(store, args.page_limit);
        transport = std::make_shared<InProcessTransport>(*core);
    } else {
        transport = std::make_shared<HttpTransport>(args.url);
    }

    Session session(transport);
    session.set_latency_ticks(args.latency_ticks);
    session.set_page_limit(args.page_limit);
    std::string session_path;
    if (!args.session_name.empty()) {
        session_path = session_file(args.session_name);
        if (fs::exists(session_path)) session.load_cache(read_file(session_path));
    }
    if (args.fresh) session.flush();

    RunOptions options;
    options.viewer = args.viewer;
    if (options.viewer.empty()) {
        if (args.store_path.empty())
            throw ConfigError("--viewer is required with --url");
        if (store.users().empty()) throw ConfigError("store has no users");
        options.viewer = store.users().front().username;
    }
    if (!args.events.empty()) {
        options.events.clear();
        for (const auto& e : args.events) options.events.push_back(parse_event(e));
    }
    for (const auto& a : args.answers) options.answers.push_back(a);
    options.max_ticks = args.max_ticks;

    long long seq_before = args.store_path.empty() ? 0 : store.mutation_seq();
    Transcript transcript = run_program(program, options, session);
    std::cout << transcript.to_text();
    std::cerr << "requests: " << session.requests() << "\n";

    if (!args.session_name.empty()) {
        fs::create_directories(fs::path(session_path).parent_path());
        write_file(session_path, session.serialize_cache());
    }
    // Cloud variables are persistent state; in --store mode that means
    // writing them back to the store file.
    if (!args.store_path.empty() && store.mutation_seq() != seq_before)
        write_file(args.store_path, store.to_json());
    return kExitOk;
}

int cmd_seed(const std::string& config_path, const std::string& fixture,
             const std::string& out_path) {
    CommunityStore store;
    if (!fixture.empty()) {
        if (fixture != "s0") throw ConfigError("unknown fixture \"" + fixture + "\"");
        store = make_s0();
    } else if (!config_path.empty()) {
        store = load_seed(parse_seed_config(read_file(config_path)));
    } else {
        store = load_seed(SeedConfig{});
    }
    write_file(out_path, store.to_json());
    std::cout << store.digest() << "\n";
    return kExitOk;
}

int cmd_serve(const std::string& store_path, const std::string& host, int port,
              long long page_limit) {
    CommunityStore store = CommunityStore::from_json(read_file(store_path));
    HttpService service(store, host, port, page_limit);
    std::cout << "serving " << store_path << " on " << service.base_url() << "\n"
              << std::flush;
    service.wait();
    return kExitOk;
}

int cmd_lint(const std::string& program_path) {
    Program program = load_program(program_path);
    auto diagnostics = lint(program);
    bool errors = false;
    for (const auto& d : diagnostics) {
        std::cout << d.line() << "\n";
        if (d.severity == Severity::Error) errors = true;
    }
    return errors ? kExitLint : kExitOk;
}

int cmd_meta(const std::string& program_path) {
    Program program = load_program(program_path);
    std::cout << code_meta_to_json(code_metadata(program)) << "\n";
    return kExitOk;
}

int cmd_examples(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create " + out_dir + ": " + ec.message());
    for (const auto& [name, program] : example_programs())
        write_file((fs::path(out_dir) / (name + ".json")).string(),
                   serialize_program(program));
    std::cout << "wrote " << example_programs().size() << " programs to " << out_dir
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"community-blocks toolkit: seed, serve, run, lint"};
    app.require_subcommand(1);

    auto* seed = app.add_subcommand("seed", "generate a deterministic store file");
    std::string seed_config, seed_fixture, seed_out;
    seed->add_option("--config", seed_config, "seed config JSON file");
    seed->add_option("--fixture", seed_fixture, "write a named fixture (s0)");
    seed->add_option("-o,--out", seed_out, "output store file")->required();

    auto* serve = app.add_subcommand("serve", "serve a store over HTTP");
    std::string serve_store, serve_host = "127.0.0.1";
    int serve_port = 8080;
    long long serve_page_limit = 20;
    serve->add_option("--store", serve_store, "store file")->required();
    serve->add_option("--host", serve_host, "bind address");
    serve->add_option("--port", serve_port, "port (0 = ephemeral)");
    serve->add_option("--page-limit", serve_page_limit, "default page size");

    auto* run = app.add_subcommand("run", "execute a program and print its transcript");
    RunArgs run_args;
    run->add_option("program", run_args.program_path, "program JSON file")->required();
    run->add_option("--viewer", run_args.viewer, "viewer username (default: first user)");
    run->add_option("--store", run_args.store_path, "store file (in-process service)");
    run->add_option("--url", run_args.url, "remote service base URL");
    run->add_option("--event", run_args.events, "hat events: flag@TICK or key:K@TICK");
    run->add_option("--answers", run_args.answers, "answers for ask, in order")
        ->delimiter(',');
    run->add_option("--max-ticks", run_args.max_ticks, "tick cap (default 10000)");
    run->add_option("--latency-ticks", run_args.latency_ticks,
                    "simulated fetch latency (default 1)");
    run->add_option("--page-limit", run_args.page_limit, "fetch page size (default 20)");
    run->add_option("--session", run_args.session_name, "named cache session");
    run->add_flag("--fresh", run_args.fresh, "flush the session cache before running");

    auto* lint_cmd = app.add_subcommand("lint", "check a program for misuse patterns");
    std::string lint_path;
    lint_cmd->add_option("program", lint_path, "program JSON file")->required();

    auto* meta = app.add_subcommand("meta", "print a program's code metadata");
    std::string meta_path;
    meta->add_option("program", meta_path, "program JSON file")->required();

    auto* examples = app.add_subcommand("examples", "write the bundled example programs");
    std::string examples_out;
    examples->add_option("-o,--out", examples_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (seed->parsed()) return cmd_seed(seed_config, seed_fixture, seed_out);
        if (serve->parsed())
            return cmd_serve(serve_store, serve_host, serve_port, serve_page_limit);
        if (run->parsed()) return cmd_run(run_args);
        if (lint_cmd->parsed()) return cmd_lint(lint_path);
        if (meta->parsed()) return cmd_meta(meta_path);
        if (examples->parsed()) return cmd_examples(examples_out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIdentity;
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ApiError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
