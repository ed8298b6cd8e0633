#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "iva/series.hpp"
#include "iva/vertex.hpp"
#include "iva/virasoro.hpp"

namespace iva {

enum class RenderFormat { text, json, latex };

RenderFormat parse_format(const std::string& s);

nlohmann::ordered_json config_json(const EngineConfig& cfg);
nlohmann::ordered_json prefactor_json(const EngineConfig& cfg, const PrefactorTag& tag,
                                      bool two_variable);
nlohmann::ordered_json state_json(const ModuleElement& v);

nlohmann::ordered_json series_json(const EngineConfig& cfg, const TwistedSeries& s);
nlohmann::ordered_json biseries_json(const EngineConfig& cfg, const TwistedBiSeries& s);
nlohmann::ordered_json ope_json(const EngineConfig& cfg, const OpeResult& ope);
nlohmann::ordered_json vir_expr_json(const EngineConfig& cfg, const VirasoroExpression& e);

std::string render_series(const EngineConfig& cfg, const TwistedSeries& s, RenderFormat fmt);
std::string render_biseries(const EngineConfig& cfg, const TwistedBiSeries& s, RenderFormat fmt);
std::string render_ope(const EngineConfig& cfg, const OpeResult& ope, RenderFormat fmt);
std::string render_vir_expr(const EngineConfig& cfg, const VirasoroExpression& e, RenderFormat fmt);

std::string latex_state(const ModuleElement& v);

}  // namespace iva
