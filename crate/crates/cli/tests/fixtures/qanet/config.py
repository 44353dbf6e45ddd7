import os
import json
import numpy as np
import tensorflow as tf

from prepro import prepro, get_embedding
from model import Model
from util import get_record_parser, convert_tokens

flags = tf.flags
flags.DEFINE_string("mode", "train", "train/debug/test")
flags.DEFINE_string("save_dir", "train/model", "Directory for saving model")
flags.DEFINE_integer("num_steps", 60000, "Number of steps")


def train(config):
    with open(config.word_emb_file, "r") as fh:
        word_emb = json.load(fh)
    with open(config.train_eval_file, "r") as fh:
        train_eval_file = json.load(fh)
    word_mat = np.array(word_emb, dtype=np.float32)

    parser = get_record_parser(config)
    train_dataset = tf.data.TFRecordDataset(config.train_record_file).map(parser).shuffle(15000).batch(32)
    handle = tf.placeholder(tf.string, shape=[])

    model = Model(config, iterator, word_mat, graph=graph)

    sess = tf.Session()
    for _ in range(config.num_steps):
        loss, train_op = sess.run([model.loss, model.train_op], feed_dict={handle: train_handle})


def main(_):
    config = flags.FLAGS
    if config.mode == "train":
        train(config)
    elif config.mode == "prepro":
        prepro(config)


if __name__ == "__main__":
    tf.app.run()
