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
#include <doctest.h>

#include "testutil.hpp"
#include "vsync/model.hpp"

using namespace vsync;

namespace {

SchemaSet healthcare_schemas() { return testutil::load_healthcare().mkb.schemas(); }

} // namespace

TEST_CASE("deleting an attribute removes exactly that attribute") {
    SchemaSet schemas = healthcare_schemas();
    SchemaSet after = apply_change(schemas, DeleteAttribute{{"S1", "Doctor", "Name"}});
    const RelationSchema* doctor = after.at("S1").find_relation("Doctor");
    REQUIRE(doctor != nullptr);
    std::vector<std::pair<std::string, TypeDomain>> expected{{"IdD", TypeDomain::Number},
                                                             {"Speciality", TypeDomain::String}};
    CHECK(doctor->attributes == expected);
    // every other source untouched
    CHECK(after.at("S2") == schemas.at("S2"));
    CHECK(after.at("S3") == schemas.at("S3"));
}

TEST_CASE("deleting a relation removes it from its source only") {
    SchemaSet schemas = healthcare_schemas();
    SchemaSet after = apply_change(schemas, DeleteRelation{{"S1", "Hospital"}});
    CHECK(after.at("S1").relations.size() == 5);
    CHECK(after.at("S1").find_relation("Hospital") == nullptr);
    CHECK(after.at("S2").find_relation("Hospital") != nullptr);
    CHECK(after.at("S3").find_relation("Hospital") != nullptr);
}

TEST_CASE("events on missing components raise UnknownTarget") {
    SchemaSet schemas = healthcare_schemas();
    CHECK_THROWS_AS(apply_change(schemas, DeleteAttribute{{"S9", "X", "Y"}}), Error);
    try {
        apply_change(schemas, DeleteAttribute{{"S9", "X", "Y"}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownTarget);
    }

    // re-applying the same event hits a now-missing target
    ChangeEvent event = DeleteAttribute{{"S1", "Doctor", "Name"}};
    SchemaSet after = apply_change(schemas, event);
    CHECK_THROWS_AS(apply_change(after, event), Error);
}

TEST_CASE("a relation emptied of attributes disappears, and an emptied source with it") {
    SchemaSet schemas;
    schemas["Z"] = SourceSchema{"Z", {{"Solo", {{"Only", TypeDomain::Number}}}}};
    SchemaSet after = apply_change(schemas, DeleteAttribute{{"Z", "Solo", "Only"}});
    CHECK(after.empty());

    schemas["Z"] = SourceSchema{
        "Z", {{"Solo", {{"Only", TypeDomain::Number}}}, {"Other", {{"K", TypeDomain::Number}}}}};
    after = apply_change(schemas, DeleteAttribute{{"Z", "Solo", "Only"}});
    CHECK(after.at("Z").relations.size() == 1);
    CHECK(after.at("Z").find_relation("Other") != nullptr);

    after = apply_change(after, DeleteRelation{{"Z", "Other"}});
    CHECK(after.empty());
}

TEST_CASE("schema invariants reject malformed values") {
    CHECK_THROWS_AS(validate(RelationSchema{"R", {}}), Error);
    CHECK_THROWS_AS(
        validate(RelationSchema{"R", {{"A", TypeDomain::Number}, {"A", TypeDomain::Number}}}),
        Error);
    CHECK_THROWS_AS(validate(SourceSchema{"S", {}}), Error);
    CHECK_THROWS_AS(validate(WebService{"W", {}, {}, {}}), Error);
    CHECK_THROWS_AS(validate(WebService{"W", {}, {"V1"}, {"W"}}), Error);
    CHECK_NOTHROW(validate(WebService{"W", {}, {"V1"}, {"W2"}}));
}

TEST_CASE("names are case-sensitive") {
    SchemaSet schemas = healthcare_schemas();
    CHECK_FALSE(target_exists(schemas, DeleteAttribute{{"S1", "doctor", "Name"}}));
    CHECK_FALSE(target_exists(schemas, DeleteAttribute{{"S1", "Doctor", "name"}}));
    CHECK(target_exists(schemas, DeleteAttribute{{"S1", "Doctor", "Name"}}));
}

TEST_CASE("extent symbols round-trip") {
    for (ExtentRelation e : {ExtentRelation::Equivalent, ExtentRelation::Superset,
                             ExtentRelation::Subset, ExtentRelation::Indifferent}) {
        CHECK(extent_from_symbol(extent_symbol(e)) == e);
        CHECK(invert(invert(e)) == e);
    }
    CHECK(invert(ExtentRelation::Superset) == ExtentRelation::Subset);
    CHECK(invert(ExtentRelation::Equivalent) == ExtentRelation::Equivalent);
}
