#pragma once

#include "sketchbound/detbounds.hpp"
#include "sketchbound/expbounds.hpp"
#include "sketchbound/lab.hpp"
#include "sketchbound/rsvdbounds.hpp"

#include <json.hpp>

namespace sketchbound {

using Json = nlohmann::ordered_json;

Json to_json(const Lemma6Constants& c);
Json to_json(const DeterministicBoundReport& r);
Json to_json(const ExpectationBoundReport& r);
Json to_json(const RsvdBoundReport& r);
Json to_json(const EmpiricalResult& r, bool with_records);

}  // namespace sketchbound
