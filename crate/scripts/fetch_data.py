#!/usr/bin/env python3
"""Download the benchmark datasets from the UCI repository and convert them
to the CSV layout declared by the schemas in data/schemas/.

Usage:
  python3 scripts/fetch_data.py [dataset ...]
  python3 scripts/fetch_data.py --selftest

Datasets: german car_evaluation solar nursery adult mushrooms bank_marketing
debtrivedi (default: all UCI ones; debtrivedi needs a manual R export, see
`convert_debtrivedi`). Output goes to data/<name>.csv. The self-test runs
every converter on embedded sample rows and needs no network.
"""

import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"
DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def download(url: str) -> bytes:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=120) as resp:
        return resp.read()


def write_rows(name: str, header: list, rows: list, expected: int) -> None:
    if len(rows) != expected:
        raise SystemExit(f"{name}: expected {expected} rows, parsed {len(rows)}")
    out = DATA_DIR / f"{name}.csv"
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)
    print(f"  wrote {out} ({len(rows)} rows)")


# --- converters: raw file text -> (header, rows) ---------------------------

def convert_german(raw: str):
    header = [
        "checking_status", "duration", "credit_history", "purpose",
        "credit_amount", "savings", "employment", "installment_rate",
        "personal_status", "other_debtors", "residence_since", "property",
        "age", "other_installment", "housing", "existing_credits", "job",
        "num_dependents", "telephone", "foreign_worker", "risk",
    ]
    rows = []
    for line in raw.splitlines():
        fields = line.split()
        if len(fields) != 21:
            continue
        fields[18] = "0" if fields[18] == "A191" else "1"  # telephone
        fields[19] = "1" if fields[19] == "A201" else "0"  # foreign worker
        fields[20] = "good" if fields[20] == "1" else "bad"
        rows.append(fields)
    return header, rows


def convert_car_evaluation(raw: str):
    header = ["buying", "maint", "doors", "persons", "lug_boot", "safety", "class"]
    rows = [line.split(",") for line in raw.splitlines() if line.count(",") == 6]
    return header, rows


def convert_solar(raw: str):
    header = [
        "zurich_class", "spot_size", "spot_distribution", "activity",
        "evolution", "previous_activity", "hist_complex", "became_complex",
        "area", "area_largest", "c_class",
    ]
    rows = []
    for line in raw.splitlines():
        fields = line.split()
        if len(fields) != 13:
            continue  # header/comment lines
        rows.append(fields[:10] + [fields[10]])  # keep the C-class count
    return header, rows


def convert_nursery(raw: str):
    header = [
        "parents", "has_nurs", "form", "children", "housing", "finance",
        "social", "health", "class",
    ]
    rows = []
    for line in raw.splitlines():
        fields = line.split(",")
        if len(fields) != 9:
            continue
        fields[5] = "0" if fields[5] == "convenient" else "1"  # finance
        rows.append(fields)
    return header, rows


def convert_adult(raw: str):
    header = [
        "workclass", "education", "marital_status", "occupation",
        "relationship", "race", "native_country", "age", "hours_per_week",
        "sex", "income",
    ]
    rows = []
    for line in raw.splitlines():
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 15:
            continue
        (age, workclass, _fnlwgt, education, _edu_num, marital, occupation,
         relationship, race, sex, _gain, _loss, hours, country, income) = fields
        rows.append([
            workclass, education, marital, occupation, relationship, race,
            country, age, hours, "1" if sex == "Male" else "0", income,
        ])
    return header, rows


def convert_mushrooms(raw: str):
    header = [
        "cap_shape", "cap_surface", "cap_color", "bruises", "odor",
        "gill_attachment", "gill_spacing", "gill_size", "gill_color",
        "stalk_shape", "stalk_surface_above_ring", "stalk_surface_below_ring",
        "stalk_color_above_ring", "stalk_color_below_ring", "veil_color",
        "ring_number", "ring_type", "spore_print_color", "population",
        "habitat", "class",
    ]
    rows = []
    for line in raw.splitlines():
        f = line.split(",")
        if len(f) != 23:
            continue
        # columns: class, cap-shape, cap-surface, cap-color, bruises, odor,
        # gill-attachment, gill-spacing, gill-size, gill-color, stalk-shape,
        # stalk-root, ssar, ssbr, scar, scbr, veil-type, veil-color,
        # ring-number, ring-type, spore-print-color, population, habitat
        # stalk-root (missing-heavy) and veil-type (constant) are dropped.
        rows.append([
            f[1], f[2], f[3],
            "1" if f[4] == "t" else "0",          # bruises
            f[5], f[6], f[7],
            "1" if f[8] == "b" else "0",          # gill size broad
            f[9],
            "1" if f[10] == "e" else "0",         # stalk shape enlarging
            f[12], f[13], f[14], f[15], f[17], f[18], f[19], f[20], f[21],
            f[22], f[0],
        ])
    return header, rows


def convert_bank_marketing(raw: str):
    reader = csv.reader(io.StringIO(raw), delimiter=";")
    file_header = next(reader)
    idx = {name: i for i, name in enumerate(file_header)}
    header = [
        "job", "marital", "education", "month", "day_of_week", "poutcome",
        "age", "duration", "campaign", "pdays", "previous", "emp_var_rate",
        "cons_price_idx", "cons_conf_idx", "euribor3m", "nr_employed",
        "default01", "housing01", "loan01", "contact01", "y",
    ]
    yn = {"no": "0", "yes": "1", "unknown": "0.5"}
    rows = []
    for f in reader:
        if not f:
            continue
        rows.append([
            f[idx["job"]], f[idx["marital"]], f[idx["education"]],
            f[idx["month"]], f[idx["day_of_week"]], f[idx["poutcome"]],
            f[idx["age"]], f[idx["duration"]], f[idx["campaign"]],
            f[idx["pdays"]], f[idx["previous"]], f[idx["emp.var.rate"]],
            f[idx["cons.price.idx"]], f[idx["cons.conf.idx"]],
            f[idx["euribor3m"]], f[idx["nr.employed"]],
            yn[f[idx["default"]]], yn[f[idx["housing"]]], yn[f[idx["loan"]]],
            "0" if f[idx["contact"]] == "cellular" else "1",
            f[idx["y"]],
        ])
    return header, rows


def convert_debtrivedi(raw: str):
    header = [
        "health", "region", "hosp_cat", "numchron_cat", "agegroup",
        "gender01", "school", "faminc", "privins01", "medicaid01", "ofp",
    ]
    rows = []
    for r in csv.DictReader(io.StringIO(raw)):
        hosp = int(r["hosp"])
        numchron = int(r["numchron"])
        age_years = float(r["age"]) * 10.0
        if age_years < 70:
            agegroup = "66-69"
        elif age_years < 75:
            agegroup = "70-74"
        elif age_years < 80:
            agegroup = "75-79"
        elif age_years < 85:
            agegroup = "80-84"
        else:
            agegroup = "85+"
        rows.append([
            r["health"], r["region"],
            "5+" if hosp >= 5 else str(hosp),
            "6+" if numchron >= 6 else str(numchron),
            agegroup,
            "1" if r["gender"] == "male" else "0",
            r["school"], r["faminc"],
            "1" if r["privins"] == "yes" else "0",
            "1" if r["medicaid"] == "yes" else "0",
            r["ofp"],
        ])
    return header, rows


# --- fetchers ----------------------------------------------------------------

def german():
    header, rows = convert_german(download(f"{BASE}/statlog/german/german.data").decode())
    write_rows("german", header, rows, 1000)


def car_evaluation():
    header, rows = convert_car_evaluation(download(f"{BASE}/car/car.data").decode())
    write_rows("car_evaluation", header, rows, 1728)


def solar():
    header, rows = convert_solar(download(f"{BASE}/solar-flare/flare.data2").decode())
    write_rows("solar", header, rows, 1066)


def nursery():
    header, rows = convert_nursery(download(f"{BASE}/nursery/nursery.data").decode())
    write_rows("nursery", header, rows, 12960)


def adult():
    header, rows = convert_adult(download(f"{BASE}/adult/adult.data").decode())
    write_rows("adult", header, rows, 32561)


def mushrooms():
    header, rows = convert_mushrooms(
        download(f"{BASE}/mushroom/agaricus-lepiota.data").decode()
    )
    write_rows("mushrooms", header, rows, 8124)


def bank_marketing():
    blob = download(f"{BASE}/00222/bank-additional.zip")
    with zipfile.ZipFile(io.BytesIO(blob)) as z:
        raw = z.read("bank-additional/bank-additional.csv").decode()
    header, rows = convert_bank_marketing(raw)
    write_rows("bank_marketing", header, rows, 4119)


def debtrivedi():
    """Not on UCI. Export the raw table from R first:
    R -e 'data("DebTrivedi", package = "pscl");
          write.csv(DebTrivedi, "data/debtrivedi_raw.csv", row.names = FALSE)'
    """
    raw_path = DATA_DIR / "debtrivedi_raw.csv"
    if not raw_path.exists():
        raise SystemExit(f"{raw_path} not found; export it from R first (see --help)")
    header, rows = convert_debtrivedi(raw_path.read_text())
    write_rows("debtrivedi", header, rows, 4406)


FETCHERS = {
    "german": german,
    "car_evaluation": car_evaluation,
    "solar": solar,
    "nursery": nursery,
    "adult": adult,
    "mushrooms": mushrooms,
    "bank_marketing": bank_marketing,
    "debtrivedi": debtrivedi,
}


# --- offline self-test --------------------------------------------------------

def selftest() -> None:
    """Runs every converter on a known raw row and checks the output."""
    h, rows = convert_german(
        "A11 6 A34 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1\n"
    )
    assert len(h) == 21 and rows == [[
        "A11", "6", "A34", "A43", "1169", "A65", "A75", "4", "A93", "A101",
        "4", "A121", "67", "A143", "A152", "2", "A173", "1", "1", "1", "good",
    ]], rows

    _, rows = convert_car_evaluation("vhigh,vhigh,2,2,small,low,unacc\n")
    assert rows == [["vhigh", "vhigh", "2", "2", "small", "low", "unacc"]], rows

    _, rows = convert_solar("C S O 1 2 1 1 2 1 2 0 0 0\nskip me\n")
    assert rows == [["C", "S", "O", "1", "2", "1", "1", "2", "1", "2", "0"]], rows

    _, rows = convert_nursery(
        "usual,proper,complete,1,convenient,convenient,nonprob,recommended,recommend\n"
    )
    assert rows == [[
        "usual", "proper", "complete", "1", "convenient", "0", "nonprob",
        "recommended", "recommend",
    ]], rows

    _, rows = convert_adult(
        "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical,"
        " Not-in-family, White, Male, 2174, 0, 40, United-States, <=50K\n"
    )
    assert rows == [[
        "State-gov", "Bachelors", "Never-married", "Adm-clerical",
        "Not-in-family", "White", "United-States", "39", "40", "1", "<=50K",
    ]], rows

    _, rows = convert_mushrooms("p,x,s,n,t,p,f,c,n,k,e,e,s,s,w,w,p,w,o,p,k,s,u\n")
    assert rows == [[
        "x", "s", "n", "1", "p", "f", "c", "0", "k", "1",
        "s", "s", "w", "w", "w", "o", "p", "k", "s", "u", "p",
    ]], rows

    _, rows = convert_bank_marketing(
        '"age";"job";"marital";"education";"default";"housing";"loan";"contact";'
        '"month";"day_of_week";"duration";"campaign";"pdays";"previous";"poutcome";'
        '"emp.var.rate";"cons.price.idx";"cons.conf.idx";"euribor3m";"nr.employed";"y"\n'
        '56;"housemaid";"married";"basic.4y";"no";"no";"no";"telephone";"may";"mon";'
        '261;1;999;0;"nonexistent";1.1;93.994;-36.4;4.857;5191;"no"\n'
    )
    assert rows == [[
        "housemaid", "married", "basic.4y", "may", "mon", "nonexistent",
        "56", "261", "1", "999", "0", "1.1", "93.994", "-36.4", "4.857",
        "5191", "0", "0", "0", "1", "no",
    ]], rows

    _, rows = convert_debtrivedi(
        "ofp,ofnp,opp,opnp,emer,hosp,health,numchron,adldiff,region,age,black,"
        "gender,married,school,faminc,employed,privins,medicaid\n"
        '5,0,0,0,0,1,average,2,no,other,6.9,yes,male,yes,6,2.881,yes,yes,no\n'
        '1,0,2,0,2,6,poor,8,yes,midwest,8.7,no,female,no,10,0.5,no,no,yes\n'
    )
    assert rows == [
        ["average", "other", "1", "2", "66-69", "1", "6", "2.881", "1", "0", "5"],
        ["poor", "midwest", "5+", "6+", "85+", "0", "10", "0.5", "0", "1", "1"],
    ], rows

    print("selftest ok: all converters behave as expected")


def main() -> None:
    if sys.argv[1:] == ["--selftest"]:
        selftest()
        return
    # debtrivedi needs a manual R export, so it only runs when asked for
    requested = sys.argv[1:] or [n for n in FETCHERS if n != "debtrivedi"]
    unknown = [name for name in requested if name not in FETCHERS]
    if unknown:
        raise SystemExit(f"unknown dataset(s): {', '.join(unknown)}")
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for name in requested:
        print(f"{name}:")
        FETCHERS[name]()


if __name__ == "__main__":
    main()
