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
#include "vsync/report.hpp"

#include <json.hpp>

#include "vsync/esql/printer.hpp"

namespace vsync::report {

bool any_failure(const sync::SyncReport& report) {
    for (const auto& [id, outcome] : report.per_view)
        if (std::holds_alternative<sync::Failed>(outcome)) return true;
    return false;
}

std::string render_text(const sync::SyncReport& report) {
    std::string out = "event: " + to_string(report.event) + "\n";
    if (report.per_view.empty()) out += "no affected views\n";
    for (const auto& [id, outcome] : report.per_view) {
        if (std::holds_alternative<sync::Unchanged>(outcome)) {
            out += "view " + id + ": unchanged\n";
        } else if (const auto* rewritten = std::get_if<sync::Rewritten>(&outcome)) {
            out += "view " + id + ": rewritten (extent " + extent_symbol(rewritten->extent);
            if (!rewritten->dropped.empty()) {
                out += "; dropped: ";
                for (size_t i = 0; i < rewritten->dropped.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += rewritten->dropped[i];
                }
            }
            out += ")\n";
            out += esql::print_view(rewritten->view);
        } else {
            out += "view " + id + ": failed: " + std::get<sync::Failed>(outcome).message + "\n";
        }
    }
    for (const auto& [id, outcome] : report.per_ws) {
        if (const auto* extent = std::get_if<ExtentRelation>(&outcome)) {
            out += "web service " + id + ": extent " + extent_symbol(*extent) + "\n";
        } else {
            const auto& failure = std::get<sync::WsFailure>(outcome);
            out += "web service " + id + ": failed (" +
                   (failure.fallback ? "fallback: " + *failure.fallback : "no fallback") + ")\n";
        }
    }
    return out;
}

std::string render_json(const sync::SyncReport& report) {
    nlohmann::ordered_json doc;
    doc["event"] = to_string(report.event);
    doc["views"] = nlohmann::ordered_json::array();
    for (const auto& [id, outcome] : report.per_view) {
        nlohmann::ordered_json entry;
        entry["id"] = id;
        if (std::holds_alternative<sync::Unchanged>(outcome)) {
            entry["outcome"] = "unchanged";
        } else if (const auto* rewritten = std::get_if<sync::Rewritten>(&outcome)) {
            entry["outcome"] = "rewritten";
            entry["extent"] = to_string(rewritten->extent);
            entry["dropped"] = rewritten->dropped;
            entry["esql"] = esql::print_view(rewritten->view);
        } else {
            entry["outcome"] = "failed";
            entry["message"] = std::get<sync::Failed>(outcome).message;
        }
        doc["views"].push_back(std::move(entry));
    }
    doc["web_services"] = nlohmann::ordered_json::array();
    for (const auto& [id, outcome] : report.per_ws) {
        nlohmann::ordered_json entry;
        entry["id"] = id;
        if (const auto* extent = std::get_if<ExtentRelation>(&outcome)) {
            entry["outcome"] = "extent";
            entry["extent"] = to_string(*extent);
        } else {
            const auto& failure = std::get<sync::WsFailure>(outcome);
            entry["outcome"] = "failed";
            if (failure.fallback)
                entry["fallback"] = *failure.fallback;
            else
                entry["fallback"] = nullptr;
        }
        doc["web_services"].push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

} // namespace vsync::report
