import json
import os
import typing

import numpy as np

from mwe.config.defaults import as_dict
from mwe.corpus.tokenizer import check_identifier, normalize_tag
from mwe.embedding.word_embedding import WordEmbedding
from mwe.features.clips import ClipFeatures
from mwe.joint.config import JointConfig
from mwe.joint.encoders import AudioEncoder, SemanticEncoder
from mwe.joint.trainer import JointModel
from mwe.joint.triplets import SupervisionRecord
from utils.utils import parse_error, missing_file_error, DataFormatError


def save_checkpoint(path: str, model: JointModel, extra: typing.Optional[dict[str, typing.Any]] = None) -> None:
    """Single JSON file: config echo, the word-embedding checksum and every encoder parameter as decimal floats."""
    content = {
        "config": as_dict(model.config),
        "embedding_checksum": model.semantic.embedding.checksum(),
        "audio_encoder": {name: value.tolist() for name, value in model.audio.parameters().items()},
        "semantic_encoder": {name: value.tolist() for name, value in model.semantic.parameters().items()},
    }
    if extra is not None:
        content.update(extra)

    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(content, file, sort_keys=True)
        file.write("\n")


def load_checkpoint(path: str, emb: WordEmbedding) -> JointModel:
    if not os.path.isfile(path):
        raise missing_file_error(path)

    with open(path, "r", encoding="utf-8") as file:
        try:
            content = json.load(file)
        except json.JSONDecodeError as e:
            raise parse_error(path, e.lineno, f"invalid JSON ({e.msg})")

    try:
        config = JointConfig.from_dict(content["config"])
        dtype = config.np_dtype
        audio = AudioEncoder(**{name: np.array(content["audio_encoder"][name], dtype=dtype)
                                for name in AudioEncoder.PARAMETERS})
        semantic = SemanticEncoder(emb, **{name: np.array(content["semantic_encoder"][name], dtype=dtype)
                                           for name in SemanticEncoder.PARAMETERS})
    except KeyError as e:
        raise DataFormatError(f"{path}: checkpoint is missing {e}", path)
    except ValueError as e:
        raise DataFormatError(f"{path}: {e}", path)

    return JointModel(audio, semantic, config)


def load_supervision(path: str, clips: typing.Iterable[ClipFeatures]) -> list[SupervisionRecord]:
    """Supervision JSON Lines {clip_id, track_id, artist_id, tags}, joined with feature vectors on clip_id."""
    if not os.path.isfile(path):
        raise missing_file_error(path)

    clips_by_id = {clip.clip_id: clip for clip in clips}
    records = []
    with open(path, "r", encoding="utf-8") as file:
        for line_num, line in enumerate(file, start=1):
            if len(line.strip()) == 0:
                continue
            try:
                obj = json.loads(line)
                clip_id = str(obj["clip_id"])
                record = SupervisionRecord(
                    clip=clips_by_id[clip_id],
                    tags=[normalize_tag(tag) for tag in obj.get("tags", [])],
                    artist_id=check_identifier("artist_id", str(obj["artist_id"])),
                    track_id=check_identifier("track_id", str(obj["track_id"])),
                )
            except json.JSONDecodeError as e:
                raise parse_error(path, line_num, f"invalid JSON ({e.msg})")
            except KeyError as e:
                raise parse_error(path, line_num, f"unknown clip or missing key {e}")
            except ValueError as e:
                raise parse_error(path, line_num, str(e))

            records.append(record)
    return records
