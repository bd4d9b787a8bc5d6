#pragma once

#include "json.hpp"

#include "camal/character.hpp"
#include "camal/quotient.hpp"
#include "camal/rep.hpp"
#include "camal/words.hpp"

namespace camal {

// JSON views of the result structs.  Representations and matrices are
// reported by their scalar summaries, never serialized wholesale.
nlohmann::json to_json(const WitnessResult& w);
nlohmann::json to_json(const ProbeReport& p);
nlohmann::json to_json(const DirectionData& d);
nlohmann::json to_json(const ApproxSequence& s);
nlohmann::json to_json(const PsdReport& p);
nlohmann::json to_json(const GnsResult& g);
nlohmann::json to_json(const KernelReport& k);
nlohmann::json to_json(const SeparationAttempt& a);
nlohmann::json to_json(const SeparationReport& r);
nlohmann::json to_json(const AbelsReport& r);

// Removes volatile fields (any "meta" member, "elapsed_ms", "timestamp")
// recursively, so two runs of the same configuration compare byte-identical.
nlohmann::json strip_metadata(nlohmann::json j);

}  // namespace camal
