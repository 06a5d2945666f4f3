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
#include "vsync/wsvkb.hpp"

namespace vsync::wsvkb {

void Store::validate_against(const esql::ViewDefinition& view, const wsmkb::Store& mkb) {
    esql::validate(view);
    for (const auto& item : view.from) {
        if (!mkb.has_relation(item.relation))
            throw Error(ErrorCode::ValidationError, "view " + view.name +
                                                        " references unknown relation " +
                                                        item.relation.str());
    }
    auto check_attribute = [&](const esql::AttributeTerm& attr) {
        const esql::FromItem* item = view.find_alias(attr.alias);
        AttributeRef ref{item->relation.source_id, item->relation.relation_name, attr.attribute};
        if (!mkb.has_attribute(ref))
            throw Error(ErrorCode::ValidationError,
                        "view " + view.name + " references unknown attribute " + ref.str());
    };
    for (const auto& item : view.select) check_attribute(item.attribute);
    for (const auto& clause : view.where) {
        if (const auto* attr = std::get_if<esql::AttributeTerm>(&clause.lhs))
            check_attribute(*attr);
        if (const auto* attr = std::get_if<esql::AttributeTerm>(&clause.rhs))
            check_attribute(*attr);
    }
}

void Store::add_view(const ViewRecord& record, const wsmkb::Store& mkb) {
    if (views_.count(record.view_id))
        throw Error(ErrorCode::DuplicateId, "view " + record.view_id + " already registered");
    validate_against(record.definition, mkb);
    views_[record.view_id] = record;
}

void Store::set_ws_views(const std::string& ws_id, const std::vector<std::string>& view_ids) {
    for (const auto& id : view_ids)
        if (!views_.count(id))
            throw Error(ErrorCode::UnknownView,
                        "web service " + ws_id + " lists unknown view " + id);
    ws_views_[ws_id] = view_ids;
}

std::set<std::string> Store::views_referencing(const RelationRef& relation) const {
    std::set<std::string> result;
    for (const auto& [id, record] : views_) {
        for (const auto& item : record.definition.from) {
            if (item.relation == relation) {
                result.insert(id);
                break;
            }
        }
    }
    return result;
}

std::set<std::string> Store::views_referencing(const AttributeRef& attribute) const {
    std::set<std::string> result;
    for (const auto& [id, record] : views_) {
        const auto& view = record.definition;
        auto mentions = [&](const esql::AttributeTerm& attr) {
            if (attr.attribute != attribute.attribute_name) return false;
            const esql::FromItem* item = view.find_alias(attr.alias);
            return item != nullptr && item->relation == attribute.relation();
        };
        bool found = false;
        for (const auto& item : view.select)
            if (mentions(item.attribute)) { found = true; break; }
        for (auto it = view.where.begin(); !found && it != view.where.end(); ++it) {
            if (const auto* attr = std::get_if<esql::AttributeTerm>(&it->lhs))
                if (mentions(*attr)) found = true;
            if (const auto* attr = std::get_if<esql::AttributeTerm>(&it->rhs))
                if (mentions(*attr)) found = true;
        }
        if (found) result.insert(id);
    }
    return result;
}

std::set<std::string> Store::web_services_of_view(const std::string& view_id) const {
    if (!views_.count(view_id))
        throw Error(ErrorCode::UnknownView, "unknown view " + view_id);
    std::set<std::string> result;
    for (const auto& [ws_id, view_ids] : ws_views_)
        for (const auto& id : view_ids)
            if (id == view_id) result.insert(ws_id);
    return result;
}

const ViewRecord* Store::find_view(const std::string& view_id) const {
    auto it = views_.find(view_id);
    return it == views_.end() ? nullptr : &it->second;
}

const ViewRecord& Store::view(const std::string& view_id) const {
    const ViewRecord* record = find_view(view_id);
    if (!record) throw Error(ErrorCode::UnknownView, "unknown view " + view_id);
    return *record;
}

void Store::update_definition(const std::string& view_id, const esql::ViewDefinition& definition) {
    auto it = views_.find(view_id);
    if (it == views_.end()) throw Error(ErrorCode::UnknownView, "unknown view " + view_id);
    it->second.definition = definition;
    it->second.valid = true;
}

void Store::mark_invalid(const std::string& view_id) {
    auto it = views_.find(view_id);
    if (it == views_.end()) throw Error(ErrorCode::UnknownView, "unknown view " + view_id);
    it->second.valid = false;
}

} // namespace vsync::wsvkb
