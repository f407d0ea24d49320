import pytest
from hypothesis import given
from hypothesis import strategies as st

from energykg.headings import (
    DeviceRole,
    HeadingError,
    SiteKind,
    classify,
    parse_heading,
)


def test_parse_pv_with_instance_index():
    h = parse_heading("DE_KN_industrial1_pv_1")
    assert (h.country, h.city) == ("DE", "KN")
    assert h.site_kind is SiteKind.INDUSTRIAL
    assert h.site_index == 1
    assert h.device_segments == ("pv",)
    assert h.instance_index == 1


def test_parse_grid_import_without_instance():
    h = parse_heading("DE_KN_residential4_grid_import")
    assert h.site_kind is SiteKind.RESIDENTIAL
    assert h.site_index == 4
    assert h.device_segments == ("grid", "import")
    assert h.instance_index is None


def test_too_few_parts_is_an_error():
    with pytest.raises(HeadingError):
        parse_heading("DE_KN")


def test_error_names_offending_component():
    with pytest.raises(HeadingError) as excinfo:
        parse_heading("DE_KN_office1_pv")
    assert "site" in str(excinfo.value)
    with pytest.raises(HeadingError) as excinfo:
        parse_heading("DEU_KN_residential1_pv")
    assert "country" in str(excinfo.value)


def test_site_helpers():
    h = parse_heading("DE_KN_residential4_pv")
    assert h.site_name == "DE_KN_residential4"
    assert h.network_name == "DE_KN_COSSMIC"
    assert h.grid_name == "DE_KN_grid"


def test_classify_covers_all_roles():
    assert classify(parse_heading("DE_KN_residential1_pv")) is DeviceRole.PRODUCER
    assert classify(parse_heading("DE_KN_industrial3_pv_roof")) is DeviceRole.PRODUCER
    assert classify(parse_heading("DE_KN_industrial3_pv_facade")) is DeviceRole.PRODUCER
    assert (
        classify(parse_heading("DE_KN_residential1_washing_machine")) is DeviceRole.CONSUMER
    )
    assert classify(parse_heading("DE_KN_residential4_grid_import")) is DeviceRole.GRID_IMPORT
    assert classify(parse_heading("DE_KN_residential4_grid_export")) is DeviceRole.GRID_EXPORT
    # Unknown appliance names fall back to consumer.
    assert classify(parse_heading("DE_KN_residential4_ev")) is DeviceRole.CONSUMER


def test_public_sites_accepted():
    assert parse_heading("DE_KN_public1_grid_import").site_kind is SiteKind.PUBLIC


def test_round_trip_over_published_column_corpus(cossmic_columns):
    assert len(cossmic_columns) > 60
    for column in cossmic_columns:
        heading = parse_heading(column)
        assert heading.reconstruct() == column
        classify(heading)  # total over the corpus


_site_kinds = st.sampled_from(["industrial", "residential", "public"])
_segments = st.lists(
    st.from_regex(r"[a-z][a-z0-9]{0,6}", fullmatch=True), min_size=1, max_size=3
)


@given(
    kind=_site_kinds,
    site_index=st.integers(min_value=1, max_value=99),
    segments=_segments,
    instance=st.one_of(st.none(), st.integers(min_value=1, max_value=9)),
)
def test_round_trip_over_generated_headings(kind, site_index, segments, instance):
    text = f"DE_KN_{kind}{site_index}_" + "_".join(segments)
    if instance is not None:
        text += f"_{instance}"
    heading = parse_heading(text)
    assert heading.reconstruct() == text
    classify(heading)
