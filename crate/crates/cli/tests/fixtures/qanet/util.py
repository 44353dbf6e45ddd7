import re
import string
import tensorflow as tf
from collections import Counter


def get_record_parser(config):
    def parse(example):
        features = tf.parse_single_example(example, features={"context_idxs": tf.FixedLenFeature([], tf.string)})
        return tf.reshape(tf.decode_raw(features["context_idxs"], tf.int32), [config.para_limit])
    return parse


def normalize_answer(s):
    s = re.sub(r"\b(a|an|the)\b", " ", s.lower())
    return "".join(ch for ch in s if ch not in set(string.punctuation))


def f1_score(prediction, ground_truth):
    common = Counter(prediction) & Counter(ground_truth)
    return sum(common.values())


def evaluate(eval_file, answer_dict):
    f1 = 0
    for key, value in answer_dict.items():
        f1 += f1_score(value, eval_file[key])
    return {"f1": 100.0 * f1 / len(answer_dict)}


def convert_tokens(eval_file, qa_id, pp1, pp2):
    return {str(qid): eval_file[str(qid)]["context"][pp1:pp2] for qid in qa_id}
