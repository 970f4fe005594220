#!/usr/bin/env python3
"""Regenerates the synthetic refinery fixtures under fixtures/.

The three benchmark instances are built from one shared unit library. Every
ground-truth graph connects its units with labeled streams drawn from
Out(a) & In(b), so edge compatibility holds by construction; the script then
checks I/O rules and critical paths before writing anything.

Usage: tools/make_fixtures.py [fixtures_dir]
"""

import hashlib
import json
import sys
from collections import deque
from pathlib import Path

# (id, display name, aliases, inputs, outputs, requires_input)
UNITS = [
    ("cdu", "Crude Distillation Unit", ["crude distillation unit", "atmospheric distillation", "crude unit"],
     ["crude", "slop_oil", "fuel_gas", "steam", "stripped_water"],
     ["lpg", "naphtha", "kerosene", "diesel", "atm_residue", "off_gas", "sour_water"], []),
    ("vdu", "Vacuum Distillation Unit", ["vacuum distillation unit", "vacuum unit"],
     ["atm_residue", "fuel_gas", "steam"],
     ["vgo", "vacuum_residue", "off_gas", "sour_water", "slop_oil"], []),
    ("nht", "Naphtha Hydrotreater", ["naphtha hydrotreater", "naphtha hydrotreating unit"],
     ["naphtha", "coker_naphtha", "hydrogen", "fuel_gas", "steam"],
     ["treated_naphtha", "light_naphtha", "off_gas", "sour_water", "slop_oil"], ["hydrogen"]),
    ("reformer", "Catalytic Reformer", ["catalytic reformer", "ccr", "platformer"],
     ["treated_naphtha", "fuel_gas", "steam"],
     ["reformate", "hydrogen", "lpg", "off_gas", "steam", "slop_oil"], ["treated_naphtha"]),
    ("isom", "Isomerization Unit", ["isomerization unit", "light naphtha isomerization"],
     ["light_naphtha", "hydrogen", "fuel_gas", "steam"],
     ["isomerate", "lpg", "off_gas"], ["hydrogen"]),
    ("kht", "Kerosene Hydrotreater", ["kerosene hydrotreater", "jet hydrotreater"],
     ["kerosene", "hydrogen", "fuel_gas", "steam"],
     ["jet_fuel", "off_gas", "sour_water", "slop_oil"], ["hydrogen"]),
    ("dht", "Diesel Hydrotreater", ["diesel hydrotreater", "gas oil hydrotreater"],
     ["diesel", "lco", "coker_gasoil", "hydrogen", "fuel_gas", "steam"],
     ["ulsd", "wild_naphtha", "off_gas", "sour_water", "slop_oil"], ["hydrogen"]),
    ("fcc", "Fluid Catalytic Cracker", ["fluid catalytic cracker", "cat cracker", "fccu"],
     ["vgo", "atm_residue", "steam", "fuel_gas"],
     ["fcc_gasoline", "lco", "slurry_oil", "lpg", "off_gas", "sour_water", "steam", "slop_oil"], []),
    ("hcu", "Hydrocracker", ["hydrocracker", "hydrocracking unit"],
     ["vgo", "coker_gasoil", "hydrogen", "fuel_gas", "steam"],
     ["naphtha", "kerosene", "diesel", "lpg", "unconverted_oil", "off_gas", "sour_water", "slop_oil"],
     ["hydrogen"]),
    ("dcu", "Delayed Coker", ["delayed coker", "coker", "coking unit"],
     ["vacuum_residue", "slurry_oil", "slop_oil", "fuel_gas", "steam"],
     ["coker_naphtha", "coker_gasoil", "petroleum_coke", "lpg", "off_gas", "sour_water"], []),
    ("hgu", "Hydrogen Generation Unit", ["hydrogen plant", "hydrogen generation unit", "steam methane reformer"],
     ["natural_gas", "lpg", "fuel_gas", "steam", "treated_water"],
     ["hydrogen", "steam", "process_water"], []),
    ("amine", "Amine Treating Unit", ["amine treating unit", "amine unit", "gas treating unit"],
     ["off_gas", "sour_gas", "steam"],
     ["fuel_gas", "acid_gas", "slop_oil"], []),
    ("sws", "Sour Water Stripper", ["sour water stripper", "sour water stripping unit"],
     ["sour_water", "steam"],
     ["stripped_water", "sour_gas"], []),
    ("sru", "Sulfur Recovery Unit", ["sulfur recovery unit", "claus unit"],
     ["acid_gas", "sour_gas", "fuel_gas"],
     ["sulfur", "steam", "tail_gas"], ["acid_gas"]),
    ("steam_cracker", "Steam Cracker", ["steam cracker", "ethylene cracker", "olefins plant"],
     ["light_naphtha", "treated_naphtha", "lpg", "propane", "unconverted_oil", "raffinate2", "fuel_gas", "steam"],
     ["ethylene", "c3_mix", "c4_mix", "pygas", "hydrogen", "fuel_gas", "steam", "process_water"], []),
    ("c3_splitter", "C3 Splitter", ["c3 splitter", "propylene splitter"],
     ["c3_mix", "steam"],
     ["propylene", "propane"], []),
    ("pygas_ht", "Pyrolysis Gasoline Hydrotreater", ["pygas hydrotreater", "pyrolysis gasoline hydrotreater"],
     ["pygas", "hydrogen", "fuel_gas", "steam"],
     ["hydrotreated_pygas", "benzene", "off_gas", "sour_water"], ["hydrogen"]),
    ("butadiene_ext", "Butadiene Extraction Unit", ["butadiene extraction unit", "butadiene unit"],
     ["c4_mix", "steam"],
     ["butadiene", "raffinate1", "process_water"], []),
    ("mtbe_unit", "MTBE Unit", ["mtbe unit", "etherification unit"],
     ["raffinate1", "methanol", "steam"],
     ["mtbe", "raffinate2", "process_water"], []),
    ("pe_plant", "Polyethylene Plant", ["polyethylene plant", "pe plant"],
     ["ethylene", "hydrogen", "steam"],
     ["polyethylene", "vent_gas"], ["ethylene"]),
    ("pp_plant", "Polypropylene Plant", ["polypropylene plant", "pp plant"],
     ["propylene", "hydrogen", "steam"],
     ["polypropylene", "vent_gas"], ["propylene"]),
    ("eg_plant", "Ethylene Glycol Plant", ["ethylene glycol plant", "eo eg plant"],
     ["ethylene", "oxygen", "steam"],
     ["ethylene_glycol", "vent_gas", "process_water"], ["ethylene"]),
    ("styrene_plant", "Styrene Monomer Plant", ["styrene monomer plant", "sm plant"],
     ["ethylene", "benzene", "fuel_gas", "steam"],
     ["styrene", "hydrogen", "vent_gas", "process_water"], []),
    ("boiler", "Utility Boiler", ["utility boiler", "steam boiler", "boiler house"],
     ["fuel_gas", "vent_gas", "treated_water"],
     ["steam"], []),
    ("wwtp", "Wastewater Treatment Plant", ["wastewater treatment plant", "effluent treatment plant"],
     ["process_water", "stripped_water", "spent_caustic"],
     ["treated_water", "slop_oil"], []),
    ("reformate_splitter", "Reformate Splitter", ["reformate splitter"],
     ["reformate", "steam"],
     ["light_reformate", "heavy_reformate"], []),
    ("aromatics_ext", "Aromatics Extraction Unit", ["aromatics extraction unit", "sulfolane unit"],
     ["light_reformate", "hydrotreated_pygas", "steam"],
     ["bt_extract", "raffinate_naphtha"], []),
    ("bt_fractionation", "Benzene Toluene Fractionation", ["bt fractionation", "benzene toluene column"],
     ["bt_extract", "steam"],
     ["benzene", "toluene"], []),
    ("tdp", "Transalkylation Unit", ["transalkylation unit", "toluene disproportionation unit"],
     ["toluene", "c9_aromatics", "hydrogen", "fuel_gas", "steam"],
     ["benzene", "mixed_xylenes", "lpg", "off_gas"], ["hydrogen"]),
    ("xylene_fractionation", "Xylene Fractionation", ["xylene fractionation", "xylene splitter"],
     ["heavy_reformate", "mixed_xylenes", "isomerized_xylenes", "fuel_gas", "steam"],
     ["c8_aromatics", "c9_aromatics", "heavy_aromatics"], []),
    ("px_adsorption", "Paraxylene Adsorption Unit", ["paraxylene adsorption unit", "parex unit"],
     ["c8_aromatics", "steam"],
     ["paraxylene", "px_raffinate"], ["c8_aromatics"]),
    ("xylene_isom", "Xylene Isomerization Unit", ["xylene isomerization unit"],
     ["px_raffinate", "hydrogen", "fuel_gas", "steam"],
     ["isomerized_xylenes", "lpg", "off_gas"], ["hydrogen"]),
    ("pta_plant", "PTA Plant", ["pta plant", "terephthalic acid plant"],
     ["paraxylene", "oxygen", "steam"],
     ["terephthalic_acid", "vent_gas", "process_water"], ["paraxylene"]),
    ("lpg_treater", "LPG Treater", ["lpg treater", "merox unit"],
     ["lpg", "steam"],
     ["treated_lpg", "spent_caustic"], []),
]

MATERIAL_ALIASES = {
    "lpg": ["liquefied petroleum gas"],
    "vgo": ["vacuum gas oil"],
    "lco": ["light cycle oil"],
    "ulsd": ["ultra low sulfur diesel"],
    "fcc_gasoline": ["cat cracked gasoline"],
    "pygas": ["pyrolysis gasoline"],
    "mtbe": ["methyl tert butyl ether"],
    "atm_residue": ["atmospheric residue"],
}

# (id, unit_ids, edges, archetypes)
MOTIFS = [
    ("crude_front", ["cdu", "vdu"], [("cdu", "vdu", "atm_residue")], []),
    ("naphtha_reforming", ["nht", "reformer"],
     [("nht", "reformer", "treated_naphtha"), ("reformer", "nht", "hydrogen")], ["fuel", "aromatics"]),
    ("distillate_hydrotreating", ["hgu", "kht", "dht"],
     [("hgu", "kht", "hydrogen"), ("hgu", "dht", "hydrogen")], []),
    ("fcc_conversion", ["vdu", "fcc", "dht"], [("vdu", "fcc", "vgo"), ("fcc", "dht", "lco")], ["fuel"]),
    ("sulfur_block", ["amine", "sws", "sru"], [("amine", "sru", "acid_gas"), ("sws", "sru", "sour_gas")], []),
    ("hydrocracking", ["vdu", "hcu", "hgu"], [("vdu", "hcu", "vgo"), ("hgu", "hcu", "hydrogen")],
     ["petrochemical", "aromatics"]),
    ("light_naphtha_isom", ["nht", "isom"], [("nht", "isom", "light_naphtha")], ["petrochemical", "aromatics"]),
    ("olefins_polymers", ["steam_cracker", "c3_splitter", "pe_plant", "pp_plant"],
     [("steam_cracker", "c3_splitter", "c3_mix"), ("steam_cracker", "pe_plant", "ethylene"),
      ("c3_splitter", "pp_plant", "propylene")], ["petrochemical"]),
    ("c4_chain", ["steam_cracker", "butadiene_ext", "mtbe_unit"],
     [("steam_cracker", "butadiene_ext", "c4_mix"), ("butadiene_ext", "mtbe_unit", "raffinate1")],
     ["petrochemical"]),
    ("pygas_styrene", ["steam_cracker", "pygas_ht", "styrene_plant"],
     [("steam_cracker", "pygas_ht", "pygas"), ("pygas_ht", "styrene_plant", "benzene")], ["petrochemical"]),
    ("glycol", ["steam_cracker", "eg_plant"], [("steam_cracker", "eg_plant", "ethylene")], ["petrochemical"]),
    ("utilities", ["boiler", "wwtp"], [("wwtp", "boiler", "treated_water")], ["petrochemical", "aromatics"]),
    ("coking", ["vdu", "dcu"], [("vdu", "dcu", "vacuum_residue")], ["aromatics"]),
    ("aromatics_complex", ["reformer", "reformate_splitter", "aromatics_ext", "bt_fractionation", "tdp"],
     [("reformer", "reformate_splitter", "reformate"), ("reformate_splitter", "aromatics_ext", "light_reformate"),
      ("aromatics_ext", "bt_fractionation", "bt_extract"), ("bt_fractionation", "tdp", "toluene")],
     ["aromatics"]),
    ("xylene_loop", ["xylene_fractionation", "px_adsorption", "xylene_isom", "pta_plant"],
     [("xylene_fractionation", "px_adsorption", "c8_aromatics"), ("px_adsorption", "xylene_isom", "px_raffinate"),
      ("xylene_isom", "xylene_fractionation", "isomerized_xylenes"), ("px_adsorption", "pta_plant", "paraxylene")],
     ["aromatics"]),
    ("lpg_treating", ["lpg_treater", "wwtp"], [("lpg_treater", "wwtp", "spent_caustic")], ["aromatics"]),
]

# (id, source kind, source id, target unit, description)
CRITICAL_PATHS = [
    ("sour_water_to_sws", "material", "sour_water", "sws", "sour water reaches the sour water stripper"),
    ("acid_gas_to_sru", "material", "acid_gas", "sru", "acid gas reaches sulfur recovery"),
    ("off_gas_to_amine", "material", "off_gas", "amine", "hydrotreater off gas is amine treated"),
    ("hydrogen_to_dht", "material", "hydrogen", "dht", "hydrogen reaches the diesel hydrotreater"),
    ("crude_to_fcc", "unit", "cdu", "fcc", "crude unit residue feeds the cat cracker"),
    ("cracker_to_pe", "unit", "steam_cracker", "pe_plant", "cracker ethylene reaches polyethylene"),
    ("reformer_to_px", "unit", "reformer", "px_adsorption", "reformate aromatics reach paraxylene recovery"),
    ("px_to_pta", "unit", "px_adsorption", "pta_plant", "paraxylene reaches the PTA plant"),
]

PREDICATES = [
    ("hydrogen_balance", "any unit that needs hydrogen requires a hydrogen producer",
     [{"any_unit_requires_input": "hydrogen"}], [{"any_unit_produces": "hydrogen"}]),
    ("sulfur_closure", "acid gas must be converted to sulfur",
     [{"any_unit_produces": "acid_gas"}], [{"unit_present": "sru"}]),
    ("sour_water_stripping", "sour water must be stripped",
     [{"any_unit_produces": "sour_water"}], [{"unit_present": "sws"}]),
    ("off_gas_treatment", "hydrotreater off gas must be treated",
     [{"any_unit_produces": "off_gas"}], [{"unit_present": "amine"}]),
    ("ethylene_outlet", "cracker ethylene needs a consumer",
     [{"unit_present": "steam_cracker"}], [{"any_unit_consumes": "ethylene"}]),
    ("paraxylene_recovery", "a paraxylene product requires paraxylene recovery",
     [{"product_includes": "paraxylene"}], [{"unit_present": "px_adsorption"}]),
]

# Size targets: archetype -> (units, flows, products, constraints)
INSTANCES = {
    "fuel": (
        ["cdu", "vdu", "nht", "reformer", "kht", "dht", "fcc", "hgu", "amine", "sws", "sru"], 81,
        ["fcc_gasoline", "reformate", "jet_fuel", "ulsd", "sulfur"],
        ["ultra low sulfur diesel specification", "maximize gasoline yield"]),
    "petrochemical": (
        ["cdu", "vdu", "nht", "kht", "dht", "hcu", "hgu", "isom", "steam_cracker", "c3_splitter", "pygas_ht",
         "butadiene_ext", "mtbe_unit", "pe_plant", "pp_plant", "eg_plant", "styrene_plant", "amine", "sws", "sru",
         "boiler", "wwtp"], 152,
        ["polyethylene", "polypropylene", "butadiene", "ethylene_glycol", "styrene", "mtbe", "jet_fuel", "ulsd"],
        ["integrated olefins and polymers", "zero liquid sulfur discharge"]),
    "aromatics": (
        ["cdu", "vdu", "nht", "reformer", "isom", "kht", "dht", "hcu", "dcu", "hgu", "reformate_splitter",
         "aromatics_ext", "bt_fractionation", "tdp", "xylene_fractionation", "px_adsorption", "xylene_isom",
         "pta_plant", "lpg_treater", "amine", "sws", "sru", "boiler", "wwtp"], 148,
        ["paraxylene", "terephthalic_acid", "benzene", "jet_fuel", "ulsd", "petroleum_coke"],
        ["maximize paraxylene", "bottom of the barrel upgrading"]),
}

# Streams that carry the main product chain; they are kept before utilities.
UTILITIES = {"steam", "fuel_gas", "off_gas", "sour_water", "slop_oil", "stripped_water", "process_water",
             "treated_water", "vent_gas", "sour_gas", "spent_caustic", "lpg"}

UNIT = {u[0]: u for u in UNITS}


def stable_key(*parts):
    return hashlib.sha256("|".join(parts).encode()).hexdigest()


def rules_of(uid):
    return [{"kind": "requires_input", "material": m, "description": f"{UNIT[uid][1]} needs {m.replace('_', ' ')}"}
            for m in UNIT[uid][5]]


def unit_json(uid):
    _, name, aliases, inputs, outputs, _ = UNIT[uid]
    j = {"id": uid, "display_name": name, "aliases": aliases, "inputs": sorted(inputs), "outputs": sorted(outputs)}
    if rules_of(uid):
        j["io_rules"] = rules_of(uid)
    return j


def kb_json(unit_ids, archetypes):
    unit_ids = sorted(unit_ids)
    present = set(unit_ids)
    mats = set()
    for uid in unit_ids:
        mats.update(UNIT[uid][3])
        mats.update(UNIT[uid][4])
    materials = [{"id": m, **({"aliases": MATERIAL_ALIASES[m]} if m in MATERIAL_ALIASES else {})}
                 for m in sorted(mats)]
    motifs = []
    for mid, units, edges, arch in MOTIFS:
        kept = [a for a in arch if a in archetypes]
        if not set(units) <= present or (arch and not kept):
            continue
        m = {"id": mid, "unit_ids": units,
             "edges": [{"from": a, "to": b, "material": mat} for a, b, mat in edges],
             "provenance": "synthetic refinery library"}
        if kept:
            m["archetypes"] = kept
        motifs.append(m)
    paths = []
    for rid, kind, src, target, desc in CRITICAL_PATHS:
        if target not in present or (kind == "unit" and src not in present) or (kind == "material" and src not in mats):
            continue
        paths.append({"id": rid, "source_predicate": {kind: src}, "target_unit": target, "description": desc})
    return {"format_version": "1", "materials": materials, "units": [unit_json(u) for u in unit_ids],
            "motifs": motifs, "critical_paths": paths, "archetypes": sorted(archetypes)}


def candidates(unit_ids):
    out = []
    for a in unit_ids:
        for b in unit_ids:
            if a == b:
                continue
            for m in sorted(set(UNIT[a][4]) & set(UNIT[b][3])):
                out.append((a, b, m))
    return out


def reaches(edges, sources, target):
    adj = {}
    for a, b, _ in edges:
        adj.setdefault(a, set()).add(b)
    seen, todo = set(sources), deque(sources)
    while todo:
        v = todo.popleft()
        if v == target:
            return True
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return False


def rule_holds(rule, units, edges):
    kind, src, target = rule[1], rule[2], rule[3]
    if target not in units:
        return False
    if kind == "unit":
        sources = [src] if src in units else []
    else:
        sources = [u for u in units if src in UNIT[u][4]]
    return bool(sources) and reaches(edges, sources, target)


def applicable_rules(units):
    present = set(units)
    mats = {m for u in units for m in UNIT[u][4]}
    out = []
    for r in CRITICAL_PATHS:
        if r[3] not in present:
            continue
        if r[1] == "unit" and r[2] not in present:
            continue
        if r[1] == "material" and r[2] not in mats:
            continue
        out.append(r)
    return out


def build_edges(units, target):
    cand = candidates(units)
    # Motif edges and rule-carrying streams first, then process streams, then
    # utilities, each tier in a fixed pseudo-random order.
    motif_edges = {(a, b, m) for _, mu, me, _ in MOTIFS if set(mu) <= set(units) for a, b, m in me}
    required_mats = {m for u in units for m in UNIT[u][5]}

    def tier(e):
        if e in motif_edges:
            return 0
        if e[2] in required_mats:
            return 1
        return 3 if e[2] in UTILITIES else 2

    cand.sort(key=lambda e: (tier(e), stable_key(*e)))
    if len(cand) < target:
        raise SystemExit(f"only {len(cand)} compatible streams for {len(units)} units, need {target}")
    chosen = cand[:target]
    for uid in units:
        for m in UNIT[uid][5]:
            assert any(b == uid and mat == m for _, b, mat in chosen), (uid, m)
    for r in applicable_rules(units):
        assert rule_holds(r, set(units), chosen), r[0]
    return sorted(chosen)


def fmt(m):
    return m.replace("_", " ")


def rationale(units):
    parts = []
    for uid in units:
        _, name, _, inputs, outputs, _ = UNIT[uid]
        feed, product = inputs[0], outputs[0]
        parts.append(f"The {name} ({uid}) takes {fmt(feed)} and delivers {fmt(product)}.")
    return " ".join(parts)


def dump(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n")


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures"
    archetypes = set(INSTANCES)
    dump(root / "bench" / "kb.json", kb_json([u[0] for u in UNITS], archetypes))
    dump(root / "kb_fuel.json", kb_json(INSTANCES["fuel"][0], {"fuel"}))
    stats = {}
    for arch, (units, flows, products, constraints) in INSTANCES.items():
        assert len(set(units)) == len(units)
        edges = build_edges(units, flows)
        graph = {"format_version": "1",
                 "nodes": [{"id": u, "unit": u} for u in sorted(units)],
                 "edges": [{"from": a, "to": b, "material": m} for a, b, m in edges]}
        dump(root / "bench" / "graphs" / f"{arch}.json", graph)
        task = {"format_version": "1", "task_id": f"{arch}_refinery", "archetype": arch,
                "intent": {"feedstock": ["crude"] + (["natural_gas"] if "hgu" in units else []),
                           "products": products, "archetype": arch, "constraints": constraints},
                "gt_units": sorted(units), "gt_rationale": rationale(units),
                "gt_graph": f"graphs/{arch}.json",
                "critical_rules": [r[0] for r in applicable_rules(units)]}
        dump(root / "bench" / "tasks" / f"{arch}.json", task)
        stats[arch] = {"units": len(units), "flows": len(edges)}
        print(f"{arch}: {len(units)} units, {len(edges)} flows, {len(candidates(units))} candidates")
    dump(root / "bench" / "stats.json", stats)
    predicates = [{"id": pid, "description": desc, "check": {"when": when, "then": then}}
                  for pid, desc, when, then in PREDICATES]
    dump(root / "predicates.json", predicates)
    dump(root / "bench" / "predicates.json", predicates)


if __name__ == "__main__":
    main()
