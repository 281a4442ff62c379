import asyncio

import pytest

from setzer_sha.scan import ScanConfig, scan
from setzer_sha.stats import read_records


@pytest.fixture(scope="session")
def desk_scan(tmp_path_factory):
    """
    Records of a default scan over |u| <= 200
    """
    path = tmp_path_factory.mktemp("scan") / "scan.csv"
    asyncio.run(scan(ScanConfig(u_min=-200, u_max=200, out_path=str(path))))
    with open(path) as f:
        return read_records(f, include_anomalies=True)
