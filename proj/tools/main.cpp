/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vsync/esql/printer.hpp"
#include "vsync/kb_io.hpp"
#include "vsync/oracle.hpp"
#include "vsync/report.hpp"
#include "vsync/sync.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSyncFailure = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_dots(const std::string& text) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t dot = text.find('.', start);
        if (dot == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, dot - start));
        start = dot + 1;
    }
    return parts;
}

vsync::ChangeEvent parse_event(const std::string& kind, const std::string& target) {
    auto parts = split_dots(target);
    for (const auto& part : parts)
        if (part.empty())
            throw vsync::Error(vsync::ErrorCode::ValidationError,
                               "bad component path \"" + target + "\"");
    if (kind == "delete-attribute") {
        if (parts.size() != 3)
            throw vsync::Error(vsync::ErrorCode::ValidationError,
                               "delete-attribute expects Source.Relation.Attribute, got \"" +
                                   target + "\"");
        return vsync::DeleteAttribute{{parts[0], parts[1], parts[2]}};
    }
    if (kind == "delete-relation") {
        if (parts.size() != 2)
            throw vsync::Error(vsync::ErrorCode::ValidationError,
                               "delete-relation expects Source.Relation, got \"" + target + "\"");
        return vsync::DeleteRelation{{parts[0], parts[1]}};
    }
    throw vsync::Error(vsync::ErrorCode::ValidationError,
                       "unknown event \"" + kind + "\" (delete-attribute or delete-relation)");
}

int cmd_load(const std::string& path, const std::string& output, bool quiet_warnings) {
    vsync::kb_io::LoadResult loaded = vsync::kb_io::load_file(path);
    if (output == "json") {
        nlohmann::ordered_json doc;
        doc["sources"] = loaded.mkb.source_count();
        doc["type_constraints"] = loaded.mkb.tc_count();
        doc["join_constraints"] = loaded.mkb.jc_count();
        doc["pc_constraints"] = loaded.mkb.pc_count();
        doc["web_services"] = loaded.mkb.web_service_count();
        doc["views"] = loaded.vkb.view_count();
        doc["warnings"] = loaded.warnings;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "loaded " << path << ": " << loaded.mkb.source_count() << " sources, "
                  << loaded.mkb.tc_count() << " type constraints, " << loaded.mkb.jc_count()
                  << " join constraints, " << loaded.mkb.pc_count() << " pc constraints, "
                  << loaded.mkb.web_service_count() << " web services, "
                  << loaded.vkb.view_count() << " views\n";
        if (!quiet_warnings)
            for (const auto& warning : loaded.warnings)
                std::cerr << "warning: " << warning << "\n";
    }
    return kExitOk;
}

int cmd_show(const std::string& path, const std::string& view_id, const std::string& output) {
    vsync::kb_io::LoadResult loaded = vsync::kb_io::load_file(path);
    std::vector<const vsync::wsvkb::ViewRecord*> records;
    if (!view_id.empty()) {
        records.push_back(&loaded.vkb.view(view_id)); // throws UnknownView
    } else {
        for (const auto& [id, record] : loaded.vkb.views()) records.push_back(&record);
    }
    if (output == "json") {
        nlohmann::ordered_json doc = nlohmann::ordered_json::array();
        for (const auto* record : records) {
            nlohmann::ordered_json entry;
            entry["id"] = record->view_id;
            entry["esql"] = vsync::esql::print_view(record->definition);
            doc.push_back(std::move(entry));
        }
        std::cout << doc.dump(2) << "\n";
    } else {
        bool first = true;
        for (const auto* record : records) {
            if (!first) std::cout << "\n";
            first = false;
            std::cout << vsync::esql::print_view(record->definition);
        }
    }
    return kExitOk;
}

int cmd_validate(const std::string& path, const std::string& output) {
    vsync::kb_io::LoadResult loaded = vsync::kb_io::load_file(path);
    if (output == "json") {
        nlohmann::ordered_json doc;
        doc["valid"] = true;
        doc["warnings"] = loaded.warnings;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "ok\n";
        for (const auto& warning : loaded.warnings) std::cerr << "warning: " << warning << "\n";
    }
    return kExitOk;
}

int cmd_sync(const std::string& path, const std::string& kind, const std::string& target,
             const std::string& output) {
    vsync::ChangeEvent event = parse_event(kind, target);
    vsync::kb_io::LoadResult loaded = vsync::kb_io::load_file(path);
    vsync::sync::SyncReport report = vsync::sync::synchronize(loaded.mkb, loaded.vkb, event);
    std::cout << (output == "json" ? vsync::report::render_json(report)
                                   : vsync::report::render_text(report));
    return vsync::report::any_failure(report) ? kExitSyncFailure : kExitOk;
}

int cmd_fuzz(int trials, std::uint64_t seed, const std::string& output) {
    using namespace vsync;
    int agreed = 0;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
        oracle::Instance instance = oracle::generate_instance(trial_seed);
        wsmkb::Store mkb = instance.mkb;
        wsvkb::Store vkb = instance.vkb;
        sync::SyncReport report = sync::synchronize(mkb, vkb, instance.event);

        bool ok = true;
        std::string detail;
        for (const auto& [view_id, outcome] : report.per_view) {
            const auto& original = instance.vkb.view(view_id).definition;
            oracle::OutcomeSet expected =
                oracle::enumerate_outcomes(instance.mkb, original, instance.event);
            bool member = false;
            for (const auto& candidate : expected.outcomes)
                if (candidate == outcome) member = true;
            if (!member) {
                ok = false;
                detail = "view " + view_id + ": engine outcome not in oracle set";
                break;
            }
            if (!(outcome == expected.outcomes[expected.best])) {
                ok = false;
                detail = "view " + view_id + ": engine outcome is not the ranking-maximal one";
                break;
            }
            if (const auto* rewritten = std::get_if<sync::Rewritten>(&outcome)) {
                if (!sync::ve_compatible(original.ve, rewritten->extent)) {
                    ok = false;
                    detail = "view " + view_id + ": rewrite violates the view's VE";
                    break;
                }
            }
        }
        if (!ok) {
            if (output == "json") {
                nlohmann::ordered_json doc;
                doc["trials"] = trials;
                doc["agreed"] = agreed;
                doc["first_disagreement_seed"] = trial_seed;
                doc["detail"] = detail;
                std::cout << doc.dump(2) << "\n";
            } else {
                std::cout << "disagreement at seed " << trial_seed << ": " << detail << "\n";
            }
            return kExitSyncFailure;
        }
        ++agreed;
    }
    if (output == "json") {
        nlohmann::ordered_json doc;
        doc["trials"] = trials;
        doc["agreed"] = agreed;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << agreed << "/" << trials << " agree\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"View synchronization for E-SQL views over evolving information sources"};
    app.require_subcommand(1);
    std::string output = "text";
    app.add_option("--output", output, "Report format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string kb_path, view_id, event_kind, event_target;
    int trials = 0;
    std::uint64_t seed = 0;
    bool quiet = false;

    CLI::App* load = app.add_subcommand("load", "Load a knowledge-base file and print a summary");
    load->add_option("kb", kb_path, "Knowledge-base JSON file")->required();
    load->add_flag("--quiet-warnings", quiet, "Suppress consistency warnings");

    CLI::App* validate = app.add_subcommand("validate", "Validate a knowledge-base file");
    validate->add_option("kb", kb_path, "Knowledge-base JSON file")->required();

    CLI::App* show = app.add_subcommand("show", "Print stored views in canonical E-SQL");
    show->add_option("kb", kb_path, "Knowledge-base JSON file")->required();
    show->add_option("view-id", view_id, "Single view to print");

    CLI::App* sync_cmd = app.add_subcommand("sync", "Apply a deletion event and rewrite views");
    sync_cmd->add_option("kb", kb_path, "Knowledge-base JSON file")->required();
    sync_cmd->add_option("event", event_kind, "delete-attribute | delete-relation")->required();
    sync_cmd->add_option("target", event_target, "Dotted component path, e.g. S1.Doctor.Name")
        ->required();

    CLI::App* fuzz = app.add_subcommand("fuzz", "Check engine/oracle agreement on random instances");
    fuzz->add_option("--trials", trials, "Number of generated instances")->required();
    fuzz->add_option("--seed", seed, "Base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(load)) return cmd_load(kb_path, output, quiet);
        if (app.got_subcommand(validate)) return cmd_validate(kb_path, output);
        if (app.got_subcommand(show)) return cmd_show(kb_path, view_id, output);
        if (app.got_subcommand(sync_cmd)) return cmd_sync(kb_path, event_kind, event_target, output);
        if (app.got_subcommand(fuzz)) {
            if (trials < 1) {
                std::cerr << "error: --trials must be at least 1\n";
                return kExitUsage;
            }
            return cmd_fuzz(trials, seed, output);
        }
    } catch (const vsync::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
