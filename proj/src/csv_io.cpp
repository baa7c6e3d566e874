#include "gridsched/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "gridsched/error.hpp"

namespace gridsched::io {

using scenario::Series;

namespace {

std::string format_probability(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(line);
  }
  return out;
}

/// Column positions by header name; throws on a missing column.
class Header {
 public:
  Header(const std::string& line, const std::string& source) : source_(source) {
    const auto cells = split(line);
    for (std::size_t i = 0; i < cells.size(); ++i) columns_[cells[i]] = i;
    width_ = cells.size();
  }
  std::size_t operator[](const std::string& name) const {
    const auto it = columns_.find(name);
    require(it != columns_.end(), ErrorKind::LoadError,
            source_ + ": missing column '" + name + "'");
    return it->second;
  }
  std::size_t width() const { return width_; }

 private:
  std::map<std::string, std::size_t> columns_;
  std::size_t width_ = 0;
  std::string source_;
};

double parse_double(const std::string& cell, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  require(!cell.empty() && end == cell.c_str() + cell.size() && errno != ERANGE,
          ErrorKind::LoadError, where + ": '" + cell + "' is not a number");
  return v;
}

long long parse_int(const std::string& cell, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(cell.c_str(), &end, 10);
  require(!cell.empty() && end == cell.c_str() + cell.size() && errno != ERANGE,
          ErrorKind::LoadError, where + ": '" + cell + "' is not an integer");
  return v;
}

std::string row_where(const std::string& source, std::size_t line) {
  return source + " line " + std::to_string(line + 1);
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

scenario::ForecastSeries parse_forecasts(const std::string& text, const std::string& source) {
  const auto lines = lines_of(text);
  require(!lines.empty(), ErrorKind::LoadError, source + ": empty file");
  const Header header(lines[0], source);
  const std::size_t slot_col = header["slot"];
  std::array<std::size_t, scenario::kSeriesCount> cols{};
  for (Series s : scenario::kAllSeries)
    cols[static_cast<std::size_t>(s)] = header[std::string(scenario::series_name(s))];

  scenario::ForecastSeries f;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = row_where(source, r);
    const auto cells = split(lines[r]);
    require(cells.size() == header.width(), ErrorKind::LoadError,
            where + ": expected " + std::to_string(header.width()) + " cells");
    const long long slot = parse_int(cells[slot_col], where);
    require(slot == static_cast<long long>(r), ErrorKind::LoadError,
            where + ": slot sequence broken, expected slot " + std::to_string(r) + " but found " +
                std::to_string(slot));
    for (Series s : scenario::kAllSeries)
      f[s].push_back(parse_double(cells[cols[static_cast<std::size_t>(s)]], where));
  }
  require(f.slots() > 0, ErrorKind::LoadError, source + ": no data rows");
  try {
    f.validate();
  } catch (const Error& e) {
    fail(ErrorKind::InvalidParameter, source + ": " + e.what());
  }
  return f;
}

scenario::ForecastSeries load_forecasts(const std::string& path) {
  return parse_forecasts(read_file(path), path);
}

std::string forecasts_to_csv(const scenario::ForecastSeries& forecast) {
  std::string out = "slot";
  for (Series s : scenario::kAllSeries) out += "," + std::string(scenario::series_name(s));
  out += '\n';
  for (std::size_t t = 0; t < forecast.slots(); ++t) {
    std::vector<std::string> row{std::to_string(t + 1)};
    for (Series s : scenario::kAllSeries) row.push_back(format_number(forecast.at(s, t)));
    append_row(out, row);
  }
  return out;
}

std::string scenarios_to_csv(const scenario::ScenarioSet& set) {
  std::string out = "scenario_id,prob,slot";
  for (Series s : scenario::kAllSeries) out += "," + std::string(scenario::series_name(s));
  out += '\n';
  for (const auto& sc : set.scenarios)
    for (std::size_t t = 0; t < sc.values.slots(); ++t) {
      std::vector<std::string> row{std::to_string(sc.id), format_probability(sc.probability),
                                   std::to_string(t + 1)};
      for (Series s : scenario::kAllSeries) row.push_back(format_number(sc.values.at(s, t)));
      append_row(out, row);
    }
  return out;
}

scenario::ScenarioSet parse_scenarios(const std::string& text, const std::string& source) {
  const auto lines = lines_of(text);
  require(!lines.empty(), ErrorKind::LoadError, source + ": empty file");
  const Header header(lines[0], source);
  const std::size_t id_col = header["scenario_id"];
  const std::size_t prob_col = header["prob"];
  const std::size_t slot_col = header["slot"];
  std::array<std::size_t, scenario::kSeriesCount> cols{};
  for (Series s : scenario::kAllSeries)
    cols[static_cast<std::size_t>(s)] = header[std::string(scenario::series_name(s))];

  scenario::ScenarioSet set;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string where = row_where(source, r);
    const auto cells = split(lines[r]);
    require(cells.size() == header.width(), ErrorKind::LoadError,
            where + ": expected " + std::to_string(header.width()) + " cells");
    const auto id = static_cast<std::size_t>(parse_int(cells[id_col], where));
    const double prob = parse_double(cells[prob_col], where);
    const long long slot = parse_int(cells[slot_col], where);
    if (set.scenarios.empty() || set.scenarios.back().id != id || slot == 1) {
      require(slot == 1, ErrorKind::LoadError, where + ": a scenario must start at slot 1");
      scenario::Scenario sc;
      sc.id = id;
      sc.probability = prob;
      set.scenarios.push_back(std::move(sc));
    }
    scenario::Scenario& sc = set.scenarios.back();
    require(slot == static_cast<long long>(sc.values.slots()) + 1, ErrorKind::LoadError,
            where + ": slot sequence broken in scenario " + std::to_string(id));
    require(prob == sc.probability, ErrorKind::LoadError,
            where + ": probability changes within scenario " + std::to_string(id));
    for (Series s : scenario::kAllSeries)
      sc.values[s].push_back(parse_double(cells[cols[static_cast<std::size_t>(s)]], where));
  }
  try {
    set.validate(1e-12);
  } catch (const Error& e) {
    fail(ErrorKind::LoadError, source + ": " + e.what());
  }
  return set;
}

scenario::ScenarioSet load_scenarios(const std::string& path) {
  return parse_scenarios(read_file(path), path);
}

std::string schedule_to_csv(const evhvac::CommunityProblem& problem,
                            const evhvac::EvHvacSchedule& schedule) {
  std::string out = "slot,price,grid_import_kw";
  for (const auto& h : schedule.households) {
    out += "," + h.id + "_hvac_kw," + h.id + "_t_in_c";
    for (const auto& ev : h.evs)
      out += "," + ev.id + "_charge_kw," + ev.id + "_discharge_kw," + ev.id + "_soc";
  }
  out += '\n';
  for (int t = 0; t < problem.horizon; ++t) {
    std::vector<std::string> row{std::to_string(t + 1), format_number(problem.prices[t]),
                                 format_number(schedule.grid_import[t])};
    for (const auto& h : schedule.households) {
      row.push_back(format_number(h.hvac_power[t]));
      row.push_back(format_number(h.states[t + 1].t_in));
      for (const auto& ev : h.evs) {
        row.push_back(format_number(ev.charge[t]));
        row.push_back(format_number(ev.discharge[t]));
        row.push_back(format_number(ev.soc[t + 1]));
      }
    }
    append_row(out, row);
  }
  return out;
}

std::string first_stage_to_csv(const mgbid::MicrogridConfig& mg,
                               const mgbid::BiddingSolution& solution) {
  std::string out = "slot,bid_kw";
  for (const auto& u : mg.units) out += "," + u.name + "_on";
  out += '\n';
  for (int t = 0; t < mg.horizon; ++t) {
    std::vector<std::string> row{std::to_string(t + 1), format_number(solution.first.bid[t])};
    for (std::size_t i = 0; i < mg.units.size(); ++i)
      row.push_back(solution.first.commitment[i][t] > 0.5 ? "1" : "0");
    append_row(out, row);
  }
  return out;
}

std::string dispatch_to_csv(const mgbid::MicrogridConfig& mg,
                            const mgbid::BiddingSolution& solution) {
  std::string out = "scenario_id,prob,slot,delivery_kw,shed_kw";
  for (const auto& u : mg.units) out += "," + u.name + "_kw";
  for (std::size_t w = 0; w < mg.wind.size(); ++w)
    out += ",wind" + std::to_string(w) + "_avail_kw,wind" + std::to_string(w) + "_curtail_kw";
  for (std::size_t p = 0; p < mg.solar.size(); ++p)
    out += ",solar" + std::to_string(p) + "_avail_kw,solar" + std::to_string(p) + "_curtail_kw";
  for (std::size_t k = 0; k < mg.batteries.size(); ++k) {
    const std::string b = "battery" + std::to_string(k);
    out += "," + b + "_charge_kw," + b + "_discharge_kw," + b + "_energy_kwh";
  }
  for (const auto& b : mg.buildings) out += "," + b.id + "_hvac_kw," + b.id + "_t_in_c";
  out += '\n';
  for (const auto& d : solution.second)
    for (int t = 0; t < mg.horizon; ++t) {
      std::vector<std::string> row{std::to_string(d.scenario_id),
                                   format_probability(d.probability), std::to_string(t + 1),
                                   format_number(d.delivery[t]), format_number(d.shed[t])};
      for (const auto& u : d.units) row.push_back(format_number(u.power[t]));
      for (std::size_t w = 0; w < d.wind_curtailment.size(); ++w) {
        row.push_back(format_number(d.wind_available[w][t]));
        row.push_back(format_number(d.wind_curtailment[w][t]));
      }
      for (std::size_t p = 0; p < d.solar_curtailment.size(); ++p) {
        row.push_back(format_number(d.solar_available[p][t]));
        row.push_back(format_number(d.solar_curtailment[p][t]));
      }
      for (const auto& b : d.batteries) {
        row.push_back(format_number(b.charge[t]));
        row.push_back(format_number(b.discharge[t]));
        row.push_back(format_number(b.energy[t + 1]));
      }
      for (const auto& b : d.buildings) {
        row.push_back(format_number(b.hvac_power[t]));
        row.push_back(format_number(b.states[t + 1].t_in));
      }
      append_row(out, row);
    }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::LoadError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp =
      path + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::LoadError, "cannot write " + tmp);
    out << content;
    out.close();
    require(!out.fail(), ErrorKind::LoadError, "failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::LoadError, "cannot move " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace gridsched::io
