# -*- coding: utf-8 -*-
"""
Formatos de archivo: matrices MMRX, imágenes PGM, tablas CSV y gráficas SVG
"""

import csv
import logging
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from config.settings import NumericConfig
from models.errors import DimensionMismatchError, FormatError
from models.measurement import Image, MeasurementMatrix, PrecisionMode
from models.recv import FactoredRecvMatrix, MismatchTerm


logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MMRX_MAGIC = b"MMRX"
MMRX_VERSION = 1
MMRX_HEADER = struct.Struct("<4sHHQQ")
MMRX_DTYPES = {4: np.dtype("<f4"), 8: np.dtype("<f8")}


def write_mmrx(path: PathLike, matrix: Union[MeasurementMatrix, np.ndarray]) -> Path:
    """
    Escribe una matriz en formato MMRX.

    Cabecera: magic "MMRX", versión u16, tamaño del elemento u16 (4 u 8),
    M y N u64 little-endian; después las entradas por filas.
    """
    entries = matrix.entries if isinstance(matrix, MeasurementMatrix) else np.asarray(matrix)
    if entries.ndim != 2:
        raise DimensionMismatchError("MMRX solo almacena matrices 2-D", entries.shape)
    if entries.dtype not in (np.float32, np.float64):
        raise FormatError(f"Tipo no soportado por MMRX: {entries.dtype}")
    itemsize = entries.dtype.itemsize
    path = Path(path)
    header = MMRX_HEADER.pack(MMRX_MAGIC, MMRX_VERSION, itemsize, entries.shape[0], entries.shape[1])
    path.write_bytes(header + np.ascontiguousarray(entries, dtype=MMRX_DTYPES[itemsize]).tobytes(order="C"))
    return path


def read_mmrx_array(path: PathLike) -> np.ndarray:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < MMRX_HEADER.size:
        raise FormatError(f"{path}: archivo MMRX truncado")
    magic, version, itemsize, M, N = MMRX_HEADER.unpack_from(data)
    if magic != MMRX_MAGIC:
        raise FormatError(f"{path}: magic inválido {magic!r}")
    if version != MMRX_VERSION:
        raise FormatError(f"{path}: versión MMRX no soportada {version}")
    if itemsize not in MMRX_DTYPES:
        raise FormatError(f"{path}: tipo de elemento desconocido {itemsize}")
    expected = MMRX_HEADER.size + M * N * itemsize
    if len(data) != expected:
        raise FormatError(f"{path}: tamaño {len(data)} no coincide con la cabecera ({expected})")
    dtype = MMRX_DTYPES[itemsize]
    values = np.frombuffer(data, dtype=dtype, offset=MMRX_HEADER.size, count=M * N)
    return values.reshape(M, N).astype(dtype.newbyteorder("="))


def read_mmrx(path: PathLike) -> MeasurementMatrix:
    return MeasurementMatrix(read_mmrx_array(path))


def mmrx_size(M: int, N: int, precision: PrecisionMode) -> int:
    """Tamaño en bytes de un archivo MMRX"""
    return MMRX_HEADER.size + M * N * precision.dtype.itemsize


def write_factored(prefix: PathLike, recv: FactoredRecvMatrix) -> List[Path]:
    """Guarda A_recv como tres archivos MMRX: *_left (r×M), *_right (r×N), *_scale (r×1)"""
    prefix = Path(prefix)
    dtype = recv.precision.dtype
    rank = recv.rank_terms
    lefts = np.array([t.left for t in recv.terms], dtype=dtype).reshape(rank, recv.M)
    rights = np.array([t.right for t in recv.terms], dtype=dtype).reshape(rank, recv.N)
    scales = np.array([t.scale for t in recv.terms], dtype=dtype).reshape(rank, 1)
    return [
        write_mmrx(prefix.with_name(f"{prefix.name}_left.mmrx"), lefts),
        write_mmrx(prefix.with_name(f"{prefix.name}_right.mmrx"), rights),
        write_mmrx(prefix.with_name(f"{prefix.name}_scale.mmrx"), scales),
    ]


def read_factored(prefix: PathLike) -> FactoredRecvMatrix:
    prefix = Path(prefix)
    lefts = read_mmrx_array(prefix.with_name(f"{prefix.name}_left.mmrx"))
    rights = read_mmrx_array(prefix.with_name(f"{prefix.name}_right.mmrx"))
    scales = read_mmrx_array(prefix.with_name(f"{prefix.name}_scale.mmrx"))
    if not (lefts.shape[0] == rights.shape[0] == scales.shape[0]) or scales.shape[1] != 1:
        raise FormatError(f"{prefix}: factores con número de términos inconsistente")
    if not (lefts.dtype == rights.dtype == scales.dtype):
        raise FormatError(f"{prefix}: factores con precisión mixta")
    precision = PrecisionMode.of(lefts)
    terms = tuple(
        MismatchTerm(scales[t, 0], lefts[t].copy(), rights[t].copy())
        for t in range(lefts.shape[0])
    )
    return FactoredRecvMatrix(terms, lefts.shape[1], rights.shape[1], precision)


def _pgm_tokens(data: bytes) -> Tuple[List[bytes], int]:
    """Cuatro campos de la cabecera P5 y el desplazamiento de los píxeles"""
    tokens: List[bytes] = []
    position = 0
    while len(tokens) < 4:
        while position < len(data) and data[position:position + 1].isspace():
            position += 1
        if position < len(data) and data[position:position + 1] == b"#":
            while position < len(data) and data[position:position + 1] not in (b"\n", b"\r"):
                position += 1
            continue
        start = position
        while position < len(data) and not data[position:position + 1].isspace():
            position += 1
        if start == position:
            raise FormatError("Cabecera PGM incompleta")
        tokens.append(data[start:position])
    # Un único espacio separa la cabecera de los datos
    return tokens, position + 1


def read_pgm(path: PathLike, precision: PrecisionMode = PrecisionMode.DOUBLE) -> Image:
    """Lee un PGM P5 de 8 bits normalizado a [0, 1]"""
    path = Path(path)
    data = path.read_bytes()
    tokens, offset = _pgm_tokens(data)
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: solo se admite PGM binario P5")
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError:
        raise FormatError(f"{path}: cabecera PGM no numérica")
    if width < 1 or height < 1 or not 1 <= maxval <= 255:
        raise FormatError(f"{path}: dimensiones o maxval inválidos")
    pixels = np.frombuffer(data, dtype=np.uint8, offset=offset)
    if pixels.size < width * height:
        raise FormatError(f"{path}: faltan píxeles ({pixels.size} < {width * height})")
    values = pixels[: width * height].astype(np.float64) / maxval
    return Image.from_vector(values, (height, width), precision)


def write_pgm(path: PathLike, image: Image) -> Path:
    """Escribe un PGM P5 de 8 bits; recorta a [0, 1] y redondea a par"""
    path = Path(path)
    scaled = np.rint(np.clip(image.pixels.astype(np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    path.write_bytes(header + scaled.tobytes())
    return path


def format_value(value: Any, digits: int) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{digits}g")
    return str(value)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]],
              precision: PrecisionMode = PrecisionMode.DOUBLE) -> Path:
    """
    CSV estilo RFC 4180 con CRLF y dígitos significativos según la precisión

    Args:
        path: Archivo de salida
        header: Nombres de columna
        rows: Filas de valores
        precision: 17 dígitos en doble, 9 en simple
    """
    path = Path(path)
    digits = NumericConfig.CSV_DIGITS[precision]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value, digits) for value in row])
    return path


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with open(Path(path), "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def write_svg_lines(path: PathLike, series: Dict[str, Tuple[Sequence[float], Sequence[float]]],
                    title: str, log_y: bool = False, width: int = 640, height: int = 400) -> Path:
    """Gráfica SVG mínima con ejes y una polilínea por serie"""
    path = Path(path)
    margin = 50
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]

    def transform(values: Sequence[float]) -> np.ndarray:
        array = np.asarray(values, dtype=np.float64)
        if log_y:
            array = np.log10(np.maximum(array, np.finfo(np.float64).tiny))
        return array

    xs_all = np.concatenate([np.asarray(xs, dtype=np.float64) for xs, _ in series.values()]) if series else np.zeros(1)
    ys_all = np.concatenate([transform(ys) for _, ys in series.values()]) if series else np.zeros(1)
    finite = np.isfinite(ys_all)
    x_min, x_max = float(np.min(xs_all)), float(np.max(xs_all))
    y_min = float(np.min(ys_all[finite])) if finite.any() else 0.0
    y_max = float(np.max(ys_all[finite])) if finite.any() else 1.0
    x_span = (x_max - x_min) or 1.0
    y_span = (y_max - y_min) or 1.0

    def point(x: float, y: float) -> str:
        px = margin + (x - x_min) / x_span * (width - 2 * margin)
        py = height - margin - (y - y_min) / y_span * (height - 2 * margin)
        return f"{px:.2f},{py:.2f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin}" y="{height - margin + 16}" font-family="sans-serif" font-size="10">{x_min:.3g}</text>',
        f'<text x="{width - margin}" y="{height - margin + 16}" text-anchor="end" font-family="sans-serif" font-size="10">{x_max:.3g}</text>',
        f'<text x="{margin - 4}" y="{height - margin}" text-anchor="end" font-family="sans-serif" font-size="10">{y_min:.3g}</text>',
        f'<text x="{margin - 4}" y="{margin}" text-anchor="end" font-family="sans-serif" font-size="10">{y_max:.3g}</text>',
    ]
    for index, (label, (xs, ys)) in enumerate(series.items()):
        color = palette[index % len(palette)]
        values = transform(ys)
        points = " ".join(point(float(x), float(y)) for x, y in zip(xs, values) if np.isfinite(y))
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        lines.append(f'<text x="{width - margin + 4}" y="{margin + 14 * index}" font-family="sans-serif" '
                     f'font-size="10" fill="{color}">{label}</text>')
    lines.append("</svg>")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
