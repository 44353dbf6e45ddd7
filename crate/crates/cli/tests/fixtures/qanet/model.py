import tensorflow as tf

from util import residual_block, optimized_trilinear_for_attention


class Model(object):
    def __init__(self, config, batch, word_mat, trainable=True, graph=None):
        self.config = config
        self.word_mat = tf.get_variable("word_mat", initializer=tf.constant(word_mat, dtype=tf.float32), trainable=False)
        self.forward()
        if trainable:
            self.lr = tf.minimum(config.learning_rate, 0.001 / tf.log(999.0) * tf.log(tf.cast(self.global_step, tf.float32) + 1))
            self.opt = tf.train.AdamOptimizer(learning_rate=self.lr, beta1=0.8, beta2=0.999, epsilon=1e-7)
            grads = self.opt.compute_gradients(self.loss)
            self.train_op = self.opt.apply_gradients(grads, global_step=self.global_step)

    def forward(self):
        c = residual_block(self.c_emb, num_blocks=1, num_conv_layers=4, kernel_size=7, scope="Encoder_Residual_Block")
        logits = tf.layers.dense(c, 1, use_bias=False)
        self.loss = tf.reduce_mean(tf.nn.softmax_cross_entropy_with_logits_v2(logits=logits, labels=self.y1))
