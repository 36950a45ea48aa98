#!/usr/bin/env python3
"""Independent reference computations for the frozen values in the C++ tests.

Each function is written from the published clinical definition, not from the
C++ sources. Running the script prints every case; `--check` asserts the
values that are frozen into tests/unit/*.cpp and tests/acceptance/*.cpp.
"""
import json
import math
import sys
from datetime import date, timedelta

# --- unit constants (clinical reference tables) ---
MW_BILIRUBIN = 584.66
MW_BILIRUBIN_LEGACY = 548.66
GLUCOSE_FACTOR = 18.016
BUN_FACTOR = 2.8
CHOLESTEROL_FACTOR = 38.665


def cockcroft_gault(age, male, weight, height_cm, scr):
    bmi = weight / (height_cm / 100) ** 2
    ibw = (50.0 if male else 45.5) + 2.3 * (height_cm / 2.54 - 60)
    if bmi < 18.5:
        w = weight
    elif bmi < 25:
        w = min(weight, ibw)
    else:
        w = ibw + 0.4 * (weight - ibw)
    crcl = (140 - age) * w / (72 * scr) * (1.0 if male else 0.85)
    return dict(crcl=crcl, bmi=bmi, ibw=ibw, weight=w)


def ckd_epi_2021(male, age, scr, kappa_male=0.9):
    k = kappa_male if male else 0.7
    a = -0.302 if male else -0.241
    r = scr / k
    return 142 * min(r, 1) ** a * max(r, 1) ** -1.200 * 0.9938 ** age * (1.0 if male else 1.012)


def mdrd(age, male, scr, black):
    return 175 * scr ** -1.154 * age ** -0.203 * (1.0 if male else 0.742) * (1.212 if black else 1.0)


def meld3(female, bili, na, inr, cr, alb, dialysis=False):
    bili = max(bili, 1.0)
    inr = max(inr, 1.0)
    cr = max(cr, 1.0)
    if dialysis or cr > 3.0:
        cr = 3.0
    na = min(max(na, 125), 137)
    alb = min(max(alb, 1.5), 3.5)
    return (1.33 * (1 if female else 0) + 4.56 * math.log(bili) + 0.82 * (137 - na)
            - 0.24 * (137 - na) * math.log(bili) + 9.09 * math.log(inr) + 11.14 * math.log(cr)
            + 1.85 * (3.5 - alb) - 1.83 * (3.5 - alb) * math.log(cr) + 6)


def meld_na(bili, na, inr, cr, dialysis=False):
    bili = max(bili, 1.0)
    inr = max(inr, 1.0)
    cr = max(cr, 1.0)
    if dialysis or cr > 4.0:
        cr = 4.0
    na = min(max(na, 125), 137)
    mi = 0.957 * math.log(cr) + 0.378 * math.log(bili) + 1.120 * math.log(inr) + 0.643
    m = round(mi, 1) * 10  # UNOS: round to the tenth, then x10
    if m > 11:
        m = m + 1.32 * (137 - na) - 0.033 * m * (137 - na)
    return m


def child_pugh_bili_points(bili_mgdl):
    return 1 if bili_mgdl < 2 else (2 if bili_mgdl <= 3 else 3)


def homa_ir(insulin, glucose_mgdl, legacy=False):
    g = glucose_mgdl * GLUCOSE_FACTOR if legacy else glucose_mgdl / GLUCOSE_FACTOR
    return insulin * g / 22.5


def framingham(male, age, tc, hdl, sbp, treated, smoker):
    la, lt, lh, ls = math.log(age), math.log(tc), math.log(hdl), math.log(sbp)
    if male:
        age_s = math.log(min(age, 70))
        l = (52.00961 * la + 20.014077 * lt - 0.905964 * lh + 1.305784 * ls + 0.241549 * treated
             + 12.096316 * smoker - 4.605038 * la * lt - 2.84367 * age_s * smoker
             - 2.93323 * la * la - 172.300168)
        return 100 * (1 - 0.9402 ** math.exp(l))
    age_s = math.log(min(age, 78))
    l = (31.764001 * la + 22.465206 * lt - 1.187731 * lh + 2.552905 * ls + 0.420251 * treated
         + 13.07543 * smoker - 5.060998 * la * lt - 2.996945 * age_s * smoker - 146.5933061)
    return 100 * (1 - 0.98767 ** math.exp(l))


def fib4(age, ast, alt, plt_giga):
    return age * ast / (plt_giga * math.sqrt(alt))


def steroid(dose, src_eq, tgt_eq, legacy=False):
    units = dose / src_eq
    if legacy:
        units = round(units, 1)
    return units * tgt_eq


def qtc(formula, qt, hr):
    rr = 60.0 / hr
    return {
        "bazett": qt / math.sqrt(rr),
        "fridericia": qt / rr ** (1 / 3),
        "framingham": qt + 154 * (1 - rr),
        "hodges": qt + 1.75 * (hr - 60),
        "rautaharju": qt * (120 + hr) / 180,
    }[formula]


def cases():
    out = {}
    cg = cockcroft_gault(51, True, 49.0, 157, 2.0)
    out["cg_worked"] = cg
    out["cg_scr1"] = cockcroft_gault(51, True, 49.0, 157, 1.0)["crcl"]
    out["cg_obese_female"] = cockcroft_gault(60, False, 100.0, 165, 1.2)
    out["cg_underweight"] = cockcroft_gault(30, True, 50.0, 180, 1.0)["crcl"]
    out["age_term_53"] = 0.9938 ** 53
    out["ckd_epi_male_60_1.2"] = ckd_epi_2021(True, 60, 1.2)
    out["ckd_epi_male_60_1.2_legacy"] = ckd_epi_2021(True, 60, 1.2, kappa_male=0.7)
    out["ckd_epi_female_50_0.8"] = ckd_epi_2021(False, 50, 0.8)
    out["ckd_epi_male_40_0.9"] = ckd_epi_2021(True, 40, 0.9)
    out["mdrd_female_60_1.5"] = mdrd(60, False, 1.5, False)
    out["meld3_minimum"] = meld3(False, 1.0, 137, 1.0, 1.0, 3.5)
    out["meld3_ref"] = meld3(True, 3.0, 130, 1.8, 1.6, 2.8)
    out["meld_na_ref"] = meld_na(3.0, 130, 1.8, 1.6)
    out["bilirubin_100umol_mgdl"] = 100 * MW_BILIRUBIN / 10000
    out["bilirubin_35umol_mgdl"] = 35 * MW_BILIRUBIN / 10000
    out["bilirubin_35umol_mgdl_legacy"] = 35 * MW_BILIRUBIN_LEGACY / 10000
    out["glucose_5mmol_mgdl"] = 5.0 * GLUCOSE_FACTOR
    out["homa_10_100"] = homa_ir(10, 100)
    out["homa_10_100_legacy"] = homa_ir(10, 100, legacy=True)
    out["framingham_male_55"] = framingham(True, 55, 213, 50, 120, 0, 0)
    out["framingham_female_61_smoker"] = framingham(False, 61, 180, 47, 124, 1, 1)
    out["framingham_male_mmol"] = framingham(True, 60, 5.2 * CHOLESTEROL_FACTOR, 1.3 * CHOLESTEROL_FACTOR, 140, 0, 1)
    out["framingham_male_mmol_legacy"] = framingham(True, 60, 5.2 / CHOLESTEROL_FACTOR, 1.3 / CHOLESTEROL_FACTOR, 140, 0, 1)
    out["fib4_worked"] = fib4(36, 100, 100, 100)
    out["fib4_legacy"] = fib4(36, 100, 100, 100 * 1000)
    out["steroid_dex10_pred"] = steroid(10, 0.75, 5)
    out["steroid_dex10_pred_legacy"] = steroid(10, 0.75, 5, legacy=True)
    out["qtc_framingham_0.8"] = 400 + 154 * (1 - 0.8)
    out["qtc_framingham_hr75_legacy"] = 400 / (154 * (1 - 0.8))
    out["qtc_all_hr75"] = {f: qtc(f, 400, 75) for f in ["bazett", "fridericia", "framingham", "hodges", "rautaharju"]}
    out["map_120_80"] = 2 / 3 * 80 + 120 / 3
    out["bsa_170_70"] = math.sqrt(170 * 70 / 3600)
    out["ibw_female_165"] = 45.5 + 2.3 * (165 / 2.54 - 60)
    out["abw_male_180_100"] = (50 + 2.3 * (180 / 2.54 - 60)) + 0.4 * (100 - (50 + 2.3 * (180 / 2.54 - 60)))
    out["target_weight_22_175"] = 22 * 1.75 ** 2
    out["maintenance_fluids_25"] = 40 + 20 + 5
    out["fwd_male_70_80_160"] = 0.5 * 80 * (160 / 140 - 1)
    out["fena"] = (20 * 2.0) / (140 * 100) * 100
    out["calcium_corr"] = 8.0 + 0.8 * (4 - 2.5)
    out["sodium_corr"] = 130 + 0.024 * (400 - 100)
    out["osm"] = 2 * 140 + 28 / 2.8 + 180 / 18
    out["ldl"] = 200 - 50 - 150 / 5
    out["ag"] = 140 - (100 + 18)
    out["delta_ratio"] = (140 - 100 - 18 - 12) / (24 - 18)
    out["acag"] = (140 - 100 - 18) + 2.5 * (4 - 2.0)
    out["acdr"] = ((140 - 100 - 18) + 2.5 * (4 - 2.0) - 12) / (24 - 18)
    out["mme_patch25"] = 25 * 2.4
    out["mme_patch25_legacy"] = 25 * 0.13
    out["mme_mix"] = 30 * 1.5 + 10 * 5 + 25 * 2.4
    lmp = date(2023, 1, 10)
    out["edd"] = (lmp + timedelta(days=280 + (30 - 28))).strftime("%m/%d/%Y")
    out["conception"] = (lmp + timedelta(days=14 + (30 - 28))).strftime("%m/%d/%Y")
    ga = (date(2023, 3, 1) - lmp).days
    out["gestational_age"] = f"{ga // 7} weeks, {ga % 7} days"
    return out


FROZEN = {
    "cg_worked.crcl": 30.2847,
    "cg_worked.ibw": 54.1654,
    "cg_worked.bmi": 19.8791,
    "age_term_53": 0.7192,
    "ckd_epi_male_60_1.2": 69.2311,
    "ckd_epi_male_60_1.2_legacy": 51.2068,
    "ckd_epi_female_50_0.8": 89.7074,
    "ckd_epi_male_40_0.9": 110.7256,
    "mdrd_female_60_1.5": 35.4216,
    "meld3_minimum": 6.0,
    "meld3_ref": 27.5057,
    "meld_na_ref": 26.158,
    "homa_10_100": 2.4669,
    "homa_10_100_legacy": 800.7111,
    "framingham_male_55": 6.5085,
    "framingham_female_61_smoker": 5.4806,
    "framingham_male_mmol": 15.1496,
    "framingham_male_mmol_legacy": 2.5423,
    "cg_obese_female.crcl": 58.3554,
    "cg_underweight": 76.3889,
    "qtc_framingham_hr75_legacy": 12.987,
    "bsa_170_70": 1.8181,
    "abw_male_180_100": 84.9953,
    "fwd_male_70_80_160": 5.7143,
    "fib4_worked": 3.6,
    "steroid_dex10_pred": 66.6667,
    "steroid_dex10_pred_legacy": 66.5,
}


def lookup(d, key):
    if key in d:
        return d[key]
    head, _, tail = key.partition(".")
    return d[head][tail]


def main():
    c = cases()
    print(json.dumps(c, indent=2, sort_keys=True))
    if "--check" in sys.argv:
        bad = []
        for k, v in FROZEN.items():
            got = lookup(c, k)
            if abs(got - v) > 5e-4 * max(1.0, abs(v)):
                bad.append(f"{k}: frozen {v} vs computed {got}")
        if bad:
            print("\n".join(bad), file=sys.stderr)
            sys.exit(1)


if __name__ == "__main__":
    main()
