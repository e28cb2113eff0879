"""
Artifact Recorders

This module contains the collectors behind the optional run artifacts
(packet trace, probe log, detection log, quarantine log, monitoring-table
dump) and their CSV emission through pandas.
"""

from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd

from .packets import (BlacklistMsg, ControlPacket, DataPacket, HopResponse,
                      ProbeAck, Rrep, Rreq, TableReply, TableRequest,
                      TestBlock, packet_kind)

CSV_OPTIONS = dict(index=False, float_format="%.3f", lineterminator="\n", na_rep="")

TRACE_COLUMNS = ["time_ms", "type", "from", "to", "ref"]
PROBE_COLUMNS = ["probe_id", "route", "round", "ack_blocks", "p_bh", "verdict"]
DETECTION_COLUMNS = ["session_id", "route", "hop_verdicts", "challenge", "outcome"]
QUARANTINE_COLUMNS = ["time_ms", "issuer", "convicted"]
TABLE_COLUMNS = ["owner", "neighbor", "rreq_t", "rreq_c", "epoch"]


def format_path(path) -> str:
    return "-".join(str(node_id) for node_id in path)


def packet_ref(packet) -> str:
    """rreq_id or route of a packet, as written in the trace."""
    if isinstance(packet, Rreq):
        return f"{packet.origin}:{packet.sequence} {format_path(packet.source_route)}"
    if isinstance(packet, Rrep):
        return f"{packet.rreq_id[0]}:{packet.rreq_id[1]} {format_path(packet.route)}"
    if isinstance(packet, BlacklistMsg):
        return f"convicted={packet.convicted}"
    if isinstance(
        packet,
        (DataPacket, TestBlock, ProbeAck, ControlPacket, HopResponse, TableRequest, TableReply),
    ):
        return format_path(packet.route)
    return ""


def write_csv(rows: List[dict], columns: List[str], path: Union[str, Path]) -> Path:
    """Write rows with a fixed header, LF endings and 3-decimal floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, **CSV_OPTIONS)
    return path


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(**CSV_OPTIONS)


class RunRecorder:
    """Collects the artifact rows of one run; disabled artifacts cost nothing."""

    def __init__(
        self,
        trace: bool = False,
        probes: bool = False,
        detections: bool = False,
        quarantine: bool = False,
        tables: bool = False,
    ):
        self.trace_enabled = trace
        self.probes_enabled = probes
        self.detections_enabled = detections
        self.quarantine_enabled = quarantine
        self.tables_enabled = tables
        self.trace_rows: List[dict] = []
        self.probe_rows: List[dict] = []
        self.detection_rows: List[dict] = []
        self.quarantine_rows: List[dict] = []
        self.table_rows: List[dict] = []

    def delivery(self, time_ms: int, sender: int, receiver: int, packet) -> None:
        if self.trace_enabled:
            self.trace_rows.append(
                {
                    "time_ms": time_ms,
                    "type": packet_kind(packet),
                    "from": sender,
                    "to": receiver,
                    "ref": packet_ref(packet),
                }
            )

    def probe(self, row: dict) -> None:
        if self.probes_enabled:
            ack = row["ack_blocks"]
            self.probe_rows.append(
                dict(row, route=format_path(row["route"]), ack_blocks="" if ack is None else ack)
            )

    def detection(self, row: dict) -> None:
        if self.detections_enabled:
            self.detection_rows.append(dict(row, route=format_path(row["route"])))

    def conviction(self, time_ms: int, issuer: int, convicted: int) -> None:
        if self.quarantine_enabled:
            self.quarantine_rows.append(
                {"time_ms": time_ms, "issuer": issuer, "convicted": convicted}
            )

    def tables_dump(self, rows: List[dict]) -> None:
        if self.tables_enabled:
            self.table_rows.extend(rows)

    def write(self, paths: Dict[str, Optional[Union[str, Path]]]) -> List[Path]:
        """
        Write each enabled artifact to the path given under its key.

        Keys: trace, probes, detections, quarantine, tables.
        """
        artifacts = {
            "trace": (self.trace_rows, TRACE_COLUMNS),
            "probes": (self.probe_rows, PROBE_COLUMNS),
            "detections": (self.detection_rows, DETECTION_COLUMNS),
            "quarantine": (self.quarantine_rows, QUARANTINE_COLUMNS),
            "tables": (self.table_rows, TABLE_COLUMNS),
        }
        written = []
        for key, (rows, columns) in artifacts.items():
            target = paths.get(key)
            if target:
                written.append(write_csv(rows, columns, target))
        return written
