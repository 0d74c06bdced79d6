#include "rtv/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json_detail.hpp"

namespace rtv {

using detail::json;

namespace {

[[noreturn]] void parse_failure(const std::string& text, std::size_t byte,
                                const std::string& what) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "parse error at line " << line << ", column " << col << ": " << what;
  throw std::runtime_error(os.str());
}

json parse_checked(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_failure(text, e.byte, e.what());
  }
}

double get_num(const json& j, const std::string& field) {
  if (!j.contains(field) || !j.at(field).is_number())
    throw ValidationError(field, "missing or non-numeric");
  return j.at(field).get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.contains(field) || !j.at(field).is_number_integer())
    throw ValidationError(field, "missing or non-integer");
  return j.at(field).get<int>();
}

Point get_point(const json& j, const std::string& field) {
  if (!j.contains(field) || !j.at(field).is_array() || j.at(field).size() != 2)
    throw ValidationError(field, "expected [x, y]");
  const auto& a = j.at(field);
  if (!a[0].is_number() || !a[1].is_number())
    throw ValidationError(field, "expected numeric coordinates");
  return {a[0].get<double>(), a[1].get<double>()};
}

json point_json(const Point& p) { return json::array({p.x, p.y}); }

json request_json(const Request& r) {
  json j;
  j["id"] = r.id;
  j["origin"] = point_json(r.origin);
  j["destination"] = point_json(r.destination);
  j["request_time"] = r.request_time;
  j["max_wait"] = r.max_wait;
  j["max_delay"] = r.max_delay;
  j["penalty"] = r.penalty;
  return j;
}

json vehicle_json(const Vehicle& v) {
  json j;
  j["id"] = v.id;
  j["position"] = point_json(v.position);
  j["available_time"] = v.available_time;
  j["capacity"] = v.capacity;
  json onboard = json::array();
  for (const auto& p : v.onboard) {
    json pj;
    pj["destination"] = point_json(p.destination);
    pj["latest_dropoff"] = p.latest_dropoff;
    onboard.push_back(pj);
  }
  j["onboard"] = onboard;
  if (v.dummy_for) j["dummy_for"] = *v.dummy_for;
  return j;
}

json catalog_json(const TripCatalog& cat) {
  json j;
  json trips = json::array();
  for (const Trip& t : cat.trips) {
    json ids = json::array();
    for (int r : t.requests()) ids.push_back(r);
    trips.push_back(ids);
  }
  j["trips"] = trips;
  json pv = json::object();
  for (std::size_t v = 0; v < cat.per_vehicle.size(); ++v) {
    json lst = json::array();
    for (const auto& adm : cat.per_vehicle[v]) {
      json e;
      e["trip"] = adm.trip;
      e["cost"] = adm.cost;
      lst.push_back(e);
    }
    pv[std::to_string(cat.vehicle_ids[v])] = lst;
  }
  j["per_vehicle"] = pv;
  return j;
}

TripCatalog catalog_from(const json& j, const Instance& inst) {
  TripCatalog cat;
  if (!j.contains("trips") || !j.at("trips").is_array())
    throw ValidationError("trips", "missing or not an array");
  for (const auto& t : j.at("trips")) {
    if (!t.is_array()) throw ValidationError("trips", "trip must be an array");
    std::vector<int> ids;
    for (const auto& r : t) ids.push_back(r.get<int>());
    cat.trips.push_back(Trip::of(std::move(ids)));
  }
  if (cat.trips.empty() || !cat.trips[0].empty())
    throw ValidationError("trips", "trip 0 must be the empty trip");
  for (const Vehicle& v : inst.vehicles) cat.vehicle_ids.push_back(v.id);
  for (const Request& r : inst.requests) cat.request_ids.push_back(r.id);
  cat.per_vehicle.assign(inst.vehicles.size(), {});
  if (!j.contains("per_vehicle") || !j.at("per_vehicle").is_object())
    throw ValidationError("per_vehicle", "missing or not an object");
  for (auto it = j.at("per_vehicle").begin(); it != j.at("per_vehicle").end();
       ++it) {
    const int vid = std::stoi(it.key());
    const int vidx = inst.vehicle_index(vid);
    for (const auto& e : it.value()) {
      TripCatalog::Admissible adm;
      adm.trip = get_int(e, "trip");
      adm.cost = get_num(e, "cost");
      if (adm.trip < 0 || adm.trip >= static_cast<int>(cat.trips.size()))
        throw ValidationError("per_vehicle", "trip id out of range");
      cat.per_vehicle[static_cast<std::size_t>(vidx)].push_back(adm);
    }
  }
  cat.reindex();
  return cat;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  json j;
  json reqs = json::array();
  for (const Request& r : inst.requests) reqs.push_back(request_json(r));
  j["requests"] = reqs;
  json vehs = json::array();
  for (const Vehicle& v : inst.vehicles) vehs.push_back(vehicle_json(v));
  j["vehicles"] = vehs;
  if (inst.metric.is_euclidean()) {
    j["metric"] = "euclidean";
  } else {
    json m;
    json pts = json::array();
    for (const Point& p : inst.metric.points()) pts.push_back(point_json(p));
    json rows = json::array();
    for (const auto& row : inst.metric.matrix()) {
      json r = json::array();
      for (double d : row) r.push_back(d);
      rows.push_back(r);
    }
    m["points"] = pts;
    m["matrix"] = rows;
    j["metric"] = m;
  }
  j["speed"] = inst.speed;
  json qos;
  qos["max_wait"] = inst.qos.max_wait;
  qos["max_delay"] = inst.qos.max_delay;
  j["qos"] = qos;
  if (inst.trips) j["trips"] = catalog_json(*inst.trips);
  return detail::canonical_dump(j);
}

Instance instance_from_json(const std::string& text) {
  const json j = parse_checked(text);
  Instance inst;
  if (!j.contains("requests") || !j.at("requests").is_array())
    throw ValidationError("requests", "missing or not an array");
  for (const auto& rj : j.at("requests")) {
    Request r;
    r.id = get_int(rj, "id");
    r.origin = get_point(rj, "origin");
    r.destination = get_point(rj, "destination");
    r.request_time = get_num(rj, "request_time");
    r.max_wait = get_num(rj, "max_wait");
    r.max_delay = get_num(rj, "max_delay");
    r.penalty = rj.contains("penalty") ? get_num(rj, "penalty") : 0.0;
    inst.requests.push_back(r);
  }
  if (!j.contains("vehicles") || !j.at("vehicles").is_array())
    throw ValidationError("vehicles", "missing or not an array");
  for (const auto& vj : j.at("vehicles")) {
    Vehicle v;
    v.id = get_int(vj, "id");
    v.position = get_point(vj, "position");
    v.available_time = get_num(vj, "available_time");
    v.capacity = get_int(vj, "capacity");
    if (vj.contains("onboard")) {
      for (const auto& pj : vj.at("onboard")) {
        OnboardPassenger p;
        p.destination = get_point(pj, "destination");
        p.latest_dropoff = get_num(pj, "latest_dropoff");
        v.onboard.push_back(p);
      }
    }
    if (vj.contains("dummy_for")) v.dummy_for = get_int(vj, "dummy_for");
    inst.vehicles.push_back(v);
  }
  if (!j.contains("metric"))
    throw ValidationError("metric", "missing");
  if (j.at("metric").is_string()) {
    if (j.at("metric").get<std::string>() != "euclidean")
      throw ValidationError("metric", "unknown metric name");
    inst.metric = Metric::euclidean();
  } else if (j.at("metric").is_object()) {
    const auto& m = j.at("metric");
    std::vector<Point> pts;
    if (!m.contains("points") || !m.at("points").is_array())
      throw ValidationError("metric.points", "missing or not an array");
    for (const auto& pj : m.at("points")) {
      if (!pj.is_array() || pj.size() != 2)
        throw ValidationError("metric.points", "expected [x, y]");
      pts.push_back({pj[0].get<double>(), pj[1].get<double>()});
    }
    std::vector<std::vector<double>> rows;
    if (!m.contains("matrix") || !m.at("matrix").is_array())
      throw ValidationError("metric.matrix", "missing or not an array");
    for (const auto& rj : m.at("matrix")) {
      std::vector<double> row;
      for (const auto& d : rj) row.push_back(d.get<double>());
      rows.push_back(std::move(row));
    }
    try {
      inst.metric = Metric::explicit_matrix(std::move(pts), std::move(rows));
    } catch (const std::invalid_argument& e) {
      throw ValidationError("metric", e.what());
    }
  } else {
    throw ValidationError("metric", "expected \"euclidean\" or an object");
  }
  inst.speed = get_num(j, "speed");
  if (j.contains("qos")) {
    inst.qos.max_wait = get_num(j.at("qos"), "max_wait");
    inst.qos.max_delay = get_num(j.at("qos"), "max_delay");
  }
  validate_instance(inst);
  if (j.contains("trips")) inst.trips = catalog_from(j.at("trips"), inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  return instance_from_json(read_text_file(path));
}

void save_instance(const Instance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst));
}

std::string catalog_to_json(const TripCatalog& cat) {
  return detail::canonical_dump(catalog_json(cat));
}

TripCatalog catalog_from_json(const std::string& text, const Instance& inst) {
  return catalog_from(parse_checked(text), inst);
}

TripCatalog load_catalog(const std::string& path, const Instance& inst) {
  return catalog_from_json(read_text_file(path), inst);
}

void save_catalog(const TripCatalog& cat, const std::string& path) {
  write_text_file(path, catalog_to_json(cat));
}

std::string assignment_to_json(const Assignment& a, const TripCatalog& cat) {
  json j;
  json bv = json::object();
  for (std::size_t v = 0; v < a.trip_by_vehicle.size(); ++v) {
    json ids = json::array();
    for (int r :
         cat.trips[static_cast<std::size_t>(a.trip_by_vehicle[v])].requests())
      ids.push_back(r);
    bv[std::to_string(cat.vehicle_ids[v])] = ids;
  }
  j["by_vehicle"] = bv;
  j["cost"] = a.cost;
  json un = json::array();
  for (int r : a.unassigned) un.push_back(r);
  j["unassigned"] = un;
  return detail::canonical_dump(j);
}

void save_assignment(const Assignment& a, const TripCatalog& cat,
                     const std::string& path) {
  write_text_file(path, assignment_to_json(a, cat));
}

std::string fractional_to_json(const FractionalSolution& x) {
  json j;
  j["objective"] = x.objective;
  json vals = json::array();
  for (const auto& [key, v] : x.values) {
    json e;
    e["vehicle"] = key.first;
    e["trip"] = key.second;
    e["value"] = v;
    vals.push_back(e);
  }
  j["values"] = vals;
  return detail::canonical_dump(j);
}

FractionalSolution fractional_from_json(const std::string& text) {
  const json j = parse_checked(text);
  FractionalSolution x;
  x.objective = get_num(j, "objective");
  if (!j.contains("values") || !j.at("values").is_array())
    throw ValidationError("values", "missing or not an array");
  for (const auto& e : j.at("values")) {
    x.set(get_int(e, "vehicle"), get_int(e, "trip"), get_num(e, "value"));
  }
  return x;
}

FractionalSolution load_fractional(const std::string& path) {
  return fractional_from_json(read_text_file(path));
}

void save_fractional(const FractionalSolution& x, const std::string& path) {
  write_text_file(path, fractional_to_json(x));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rtv
